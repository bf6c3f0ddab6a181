#include <doctest.h>
#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <httplib.h>
#include <json.hpp>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>
#include <thread>

#include "flame/jpeg.hpp"
#include "flame/nadir.hpp"
#include "flame/tiff.hpp"
#include "flame/workspace.hpp"
#include "workspace_fixture.hpp"

using namespace flame;
using namespace flame::cli;
namespace fs = std::filesystem;

namespace {

std::size_t count_files(const fs::path& dir) {
    std::error_code ec;
    if (!fs::exists(dir, ec)) return 0;
    std::size_t n = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) ++n;
    return n;
}

std::size_t lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

// Path -> bytes for every file under dir.
std::map<std::string, Bytes> snapshot(const fs::path& dir) {
    std::map<std::string, Bytes> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
    return out;
}

// Ask the kernel for an unused port, then release it.
int free_port() {
    int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    ::close(fd);
    return ntohs(addr.sin_port);
}

int run(const std::string& args) {
    std::string cmd = std::string(FLAMEKIT_BIN) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("sort on the 6-pair tree, then a rerun changes nothing") {
    testutil::TempDir d("cli");
    std::string log = testutil::build_small_workspace(d.path(), 6);
    fs::path out = d / "out";
    CHECK(count_files(out / "aligned_rgb") == 6);
    CHECK(count_files(out / "thermal_jpeg") == 6);
    CHECK(count_files(out / "tiff") == 6);
    std::string manifest = read_text_file(out / "pairs.csv");
    CHECK(lines(manifest) == 7);
    CHECK(manifest.find("../raw/") != std::string::npos);
    CHECK(log.find("6 image pairs") != std::string::npos);

    auto ws = workspace::Workspace::open(out);
    for (const auto& row : ws.pairs) {
        CHECK(fs::exists(ws.resolve(row.rgb_path)));
        Bytes aligned = read_file(ws.aligned_rgb_path(row.pair_id));
        CHECK(jpeg::decode_rgb(aligned).width == 64);
        auto meta = codec::read_metadata(aligned);
        REQUIRE(meta);
        CHECK(meta->timestamp == row.timestamp);  // EXIF carried over
        CHECK(tiff::read_tiff(ws.tiff_path(row.pair_id)).width == 64);
    }

    auto before = snapshot(out);
    std::ostringstream again;
    CHECK(cmd_sort(testutil::small_config(d.path()), again) == 0);
    CHECK(again.str().find(" 0 changes") != std::string::npos);
    CHECK(snapshot(out) == before);
}

TEST_CASE("empty input: exit 0, header-only manifest, warning") {
    testutil::TempDir d("cli");
    testutil::write_small_profiles(d.path());
    fs::create_directories(d / "raw");
    std::ostringstream log;
    CHECK(cmd_sort(testutil::small_config(d.path()), log) == 0);
    CHECK(log.str().find("warning") != std::string::npos);
    CHECK(read_text_file(d / "out/pairs.csv") == "pair_id,rgb_path,thermal_path,delta_t_s,camera_model,timestamp_iso8601\n");
}

TEST_CASE("skipped and failing files") {
    testutil::TempDir d("cli");
    testutil::write_small_profiles(d.path());
    auto m = fixtures::generate(d.path(), testutil::small_fixture_options(3));
    write_file(d / "raw/broken.jpg", Bytes{});
    std::ostringstream log;
    CHECK(cmd_sort(testutil::small_config(d.path()), log) == 0);  // a skip alone is a warning
    CHECK(log.str().find("warning: skipped broken.jpg") != std::string::npos);

    // damage one radiometric payload: the pair still scans as thermal but cannot be decoded
    std::vector<fs::path> thermal;
    for (const auto& f : m.files)
        if (f.filename().string().ends_with("_T.JPG")) thermal.push_back(f);
    REQUIRE(thermal.size() == 3);
    auto damage = [](const fs::path& p) {
        auto c = jpeg::Container::parse(read_file(p));
        for (auto& s : c.segments)
            if (s.marker == jpeg::kApp7) s.body.resize(s.body.size() - 2);
        write_file(p, c.serialize());
    };
    damage(thermal[0]);
    std::ostringstream partial;
    CHECK(cmd_sort(testutil::small_config(d.path()), partial) == kPartialFailure);
    CHECK(partial.str().find("1 failed") != std::string::npos);
    CHECK(partial.str().find("error: pair") != std::string::npos);
    CHECK(lines(read_text_file(d / "out/pairs.csv")) == 3);

    damage(thermal[1]);
    damage(thermal[2]);
    std::ostringstream total;
    CHECK(cmd_sort(testutil::small_config(d.path()), total) == kTotalFailure);
}

TEST_CASE("bad configuration exits 2") {
    testutil::TempDir d("cli");
    fs::create_directories(d / "raw");
    Config c = testutil::small_config(d.path());
    std::ostringstream log;
    c.thresholds = {200, 80};
    CHECK(cmd_sort(c, log) == kBadConfig);
    c = testutil::small_config(d.path());
    c.tolerance = 0;
    CHECK(cmd_sort(c, log) == kBadConfig);
    c = testutil::small_config(d.path());
    c.input.clear();
    CHECK(cmd_sort(c, log) == kBadConfig);

    Config k;
    CHECK_THROWS_AS(apply_config_text(k, "colour = blue\n"), Error);
    CHECK_THROWS_AS(apply_config_text(k, "port = 80.5\n"), Error);
    CHECK_THROWS_AS(apply_config_text(k, "just words\n"), Error);
    apply_config_text(k, "# comment\ninput = \"/data/raw\"\nfire_min = 250 # trailing\nnormalization = fixed:0:500\n");
    CHECK(k.input == "/data/raw");
    CHECK(k.thresholds.fire_min == 250);
    CHECK(k.normalization.to_string() == "fixed:0:500");
    CHECK(exit_code_for(ErrorCode::UnknownCameraProfile) == kBadConfig);
    CHECK(exit_code_for(ErrorCode::IoFailure) == kTotalFailure);
    CHECK(exit_code_for(ErrorCode::WorkspaceNotFound) == kTotalFailure);
}

TEST_CASE("dry run writes nothing") {
    testutil::TempDir d("cli");
    testutil::write_small_profiles(d.path());
    fixtures::generate(d.path(), testutil::small_fixture_options(3));
    Config c = testutil::small_config(d.path());
    c.dry_run = true;
    std::ostringstream log;
    CHECK(cmd_sort(c, log) == 0);
    CHECK_FALSE(fs::exists(d / "out"));
    CHECK(log.str().find("plan:") != std::string::npos);

    c.dry_run = false;
    CHECK(cmd_sort(c, log) == 0);
    auto before = snapshot(d / "out");
    c.dry_run = true;
    CHECK(cmd_label(c, log) == 0);
    CHECK(cmd_align(c, log) == 0);
    CHECK(snapshot(d / "out") == before);
    CHECK(cmd_export(c, log) == kTotalFailure);  // nothing was labeled for real

    c.dry_run = false;
    CHECK(cmd_label(c, log) == 0);
    before = snapshot(d / "out");
    c.dry_run = true;
    CHECK(cmd_export(c, log) == 0);
    CHECK(snapshot(d / "out") == before);
}

TEST_CASE("label counts equal the library prelabel; export; idempotence") {
    testutil::TempDir d("cli");
    testutil::build_small_workspace(d.path(), 9);
    Config c = testutil::small_config(d.path());
    auto ws = workspace::Workspace::open(c.output);
    auto expect = workspace::prelabel(ws, {}, c.thresholds);
    std::ostringstream log;
    CHECK(cmd_label(c, log) == 0);
    CHECK(log.str().find(fmt::format("FIRE={} NO_FIRE={} NEEDS_REVIEW={}", expect.counts[label::Label::FIRE],
                                     expect.counts[label::Label::NO_FIRE], expect.counts[label::Label::NEEDS_REVIEW])) !=
          std::string::npos);
    CHECK(expect.counts[label::Label::FIRE] == 3);
    CHECK(expect.counts[label::Label::NO_FIRE] == 3);
    CHECK(expect.counts[label::Label::NEEDS_REVIEW] == 3);
    CHECK(label::read_labels_csv(c.output / "labels.csv") == expect.labels);
    CHECK(count_files(c.output / "Fire") == 9);
    CHECK(count_files(c.output / "NeedsReview") == 9);

    std::ostringstream again;
    CHECK(cmd_label(c, again) == 0);
    CHECK(again.str().find("records_changed=0 changes=0") != std::string::npos);

    std::ostringstream ex;
    CHECK(cmd_export(c, ex) == 0);
    CHECK(lines(read_text_file(c.output / "dataset/dataset.csv")) == 7);
    CHECK(count_files(c.output / "dataset/normalized") == 6);
    std::ostringstream ex2;
    CHECK(cmd_export(c, ex2) == 0);
    CHECK(ex2.str().find("0 written") != std::string::npos);

    // a later sort keeps files in their label folders
    std::ostringstream resort;
    CHECK(cmd_sort(c, resort) == 0);
    CHECK(resort.str().find(" 0 changes") != std::string::npos);
}

TEST_CASE("align: estimate from correspondences, refresh without") {
    testutil::TempDir d("cli");
    testutil::build_small_workspace(d.path(), 2);
    std::string corr = "rgb_x,rgb_y,thermal_x,thermal_y\n";
    for (int i = 0; i < 6; ++i) {
        double x = 60 + 40 * i, y = 50 + 30 * i;
        corr += fmt::format("{},{},{},{}\n", x, y, 0.25 * x - 3, 0.25 * y + 1);
    }
    write_text_file(d / "corr.csv", corr);
    Config c = testutil::small_config(d.path());
    c.correspondences = d / "corr.csv";
    std::ostringstream log;
    CHECK(cmd_align(c, log) == kBadConfig);  // needs --camera
    c.camera_model = "TESTCAM";
    c.write_profile = d / "refined.toml";
    CHECK(cmd_align(c, log) == 0);
    CHECK(lines(read_text_file(d / "out/alignment/error_map.csv")) == 7);
    auto refined = align::ProfileSet::from_file(d / "refined.toml").get("TESTCAM");
    CHECK(refined.default_params.scale_x == doctest::Approx(0.25));
    CHECK(refined.default_params.translate_y == doctest::Approx(1.0));

    Config r = testutil::small_config(d.path());
    std::ostringstream refresh;
    CHECK(cmd_align(r, refresh) == 0);
    CHECK(refresh.str().find("align: 2 pairs, 0 failed, 0 changes") != std::string::npos);
}

TEST_CASE("stack on the synthetic front gives 0.01 m/s") {
    testutil::TempDir d("cli");
    fixtures::Options o = testutil::small_fixture_options(0);
    o.nadir = true;
    o.nadir_size = {60, 24};
    fixtures::generate(d.path(), o);
    Config c;
    c.input = d / "nadir";
    c.output = d / "out";
    std::ostringstream log;
    CHECK(cmd_stack(c, log) == 0);
    fs::path dir = d / "out/nadir/plot_A";
    FloatGrid ros = tiff::decode_float32(read_file(dir / "rate_of_spread.tiff"));
    double sum = 0;
    std::size_t n = 0;
    for (double v : ros.values)
        if (v != nadir::kNoData) {
            sum += v;
            ++n;
        }
    REQUIRE(n > 0);
    CHECK(std::abs(sum / n - 0.01) < 1e-4);
    CHECK(fs::exists(dir / "arrival_time.tiff"));
    CHECK(fs::exists(dir / "energy_proxy.tiff"));
    CHECK(read_text_file(dir / "summary.txt").find("plot_A") != std::string::npos);

    std::ostringstream again;
    c.input = d / "nadir/plot_A";  // a plot directory directly
    CHECK(cmd_stack(c, again) == 0);
    CHECK(again.str().find(" 0 changes") != std::string::npos);

    Config bad = c;
    bad.input = d / "nothing";
    CHECK(cmd_stack(bad, again) == kTotalFailure);
}

TEST_CASE("serve answers /api/progress within 2 s") {
    testutil::TempDir d("cli");
    testutil::build_small_workspace(d.path(), 3);
    int port = free_port();
    Config c = testutil::small_config(d.path());
    c.port = port;
    std::ostringstream log;
    httplib::Server* running = nullptr;
    std::mutex mu;
    auto start = std::chrono::steady_clock::now();
    std::thread t([&] {
        cmd_serve(c, log, [&](httplib::Server& s) {
            std::lock_guard lock(mu);
            running = &s;
        });
    });
    std::optional<int> status;
    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(0, 200000);
    while (std::chrono::steady_clock::now() - start < std::chrono::seconds(2)) {
        if (auto r = client.Get("/api/progress")) {
            status = r->status;
            CHECK(nlohmann::json::parse(r->body)["total"] == 3);
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    CHECK(status == 200);
    {
        std::lock_guard lock(mu);
        if (running) running->stop();
    }
    t.join();
}

TEST_CASE("binary: flags override the config file, which overrides defaults") {
    testutil::TempDir d("bin");
    testutil::build_small_workspace(d.path(), 3);
    write_text_file(d / "bad.conf", "no_fire_max = 300\n");
    std::string out = (d / "out").string();
    CHECK(run("label -o " + out + " --config " + (d / "bad.conf").string()) == kBadConfig);
    CHECK(run("label -o " + out + " --config " + (d / "bad.conf").string() + " --no-fire-max 50") == 0);
    write_text_file(d / "good.conf", "output = " + out + "\n");
    CHECK(run("export --config " + (d / "good.conf").string()) == 0);
    CHECK(fs::exists(d / "out/dataset/dataset.csv"));
    CHECK(run("label --bogus") == kBadConfig);
    CHECK(run("--help") == 0);
    CHECK(run("fixtures -o " + (d / "fx").string() + " --pairs 2 --no-nadir --camera TESTCAM --profiles " +
              (d / "profiles.toml").string()) == 0);
    CHECK(count_files(d / "fx/raw") == 4);
    CHECK(run("serve -o " + (d / "missing").string()) == kTotalFailure);
}
