#pragma once

// A small sorted workspace built through the real CLI path: fixtures at
// TESTCAM size, then `sort`.

#include <sstream>

#include "flame/cli.hpp"
#include "flame/fixtures.hpp"
#include "support.hpp"

namespace testutil {

inline fs::path write_small_profiles(const fs::path& dir) {
    flame::align::ProfileSet set = flame::align::ProfileSet::from_text("", false);
    set.put(small_profile());
    fs::path p = dir / "profiles.toml";
    flame::write_text_file(p, set.to_text());
    return p;
}

inline flame::fixtures::Options small_fixture_options(int pairs = 6) {
    flame::fixtures::Options o;
    o.pairs = pairs;
    o.camera_model = "TESTCAM";
    o.profile = small_profile();
    o.nadir = false;
    return o;
}

inline flame::cli::Config small_config(const fs::path& root) {
    flame::cli::Config c;
    c.input = root / "raw";
    c.output = root / "out";
    c.profiles_file = root / "profiles.toml";
    return c;
}

/// root/raw (fixtures), root/profiles.toml, root/out (sorted). Returns the sort log.
inline std::string build_small_workspace(const fs::path& root, int pairs = 6) {
    write_small_profiles(root);
    flame::fixtures::generate(root, small_fixture_options(pairs));
    std::ostringstream log;
    int rc = flame::cli::cmd_sort(small_config(root), log);
    if (rc != 0) throw std::runtime_error("fixture sort failed: " + log.str());
    return log.str();
}

}  // namespace testutil
