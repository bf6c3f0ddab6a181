#pragma once

// Exhaustive matcher and property checks for pair_assets, shared by the unit
// and acceptance tests.

#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "flame/pairing.hpp"

namespace oracle {

using flame::pairing::MediaAsset;
using Links = std::set<std::pair<std::string, std::string>>;

struct Assignment {
    Links links;
    std::size_t count = 0;
    double total = 0;
};

inline double dt(const MediaAsset& r, const MediaAsset& t) {
    return flame::seconds_between(r.meta.timestamp, t.meta.timestamp);
}

// Max cardinality first, then min total |dt|, over every one-to-one matching.
inline void search(const std::vector<const MediaAsset*>& rgb, const std::vector<const MediaAsset*>& ir,
                   double tol, std::size_t i, std::vector<bool>& used, Assignment& cur, Assignment& best) {
    if (i == rgb.size()) {
        bool better = cur.count > best.count || (cur.count == best.count && cur.total < best.total - 1e-12);
        if (better) best = cur;
        return;
    }
    search(rgb, ir, tol, i + 1, used, cur, best);
    for (std::size_t j = 0; j < ir.size(); ++j) {
        if (used[j]) continue;
        double d = dt(*rgb[i], *ir[j]);
        if (std::abs(d) > tol) continue;
        used[j] = true;
        auto link = std::make_pair(rgb[i]->path.string(), ir[j]->path.string());
        cur.links.insert(link);
        ++cur.count;
        cur.total += std::abs(d);
        search(rgb, ir, tol, i + 1, used, cur, best);
        cur.total -= std::abs(d);
        --cur.count;
        cur.links.erase(link);
        used[j] = false;
    }
}

inline Assignment best_assignment(const std::vector<MediaAsset>& assets, double tol) {
    Assignment all;
    for (auto kind : {flame::MediaKind::IMAGE, flame::MediaKind::VIDEO}) {
        std::vector<const MediaAsset*> rgb, ir;
        for (const auto& a : assets) {
            if (a.kind == kind) (a.modality == flame::Modality::RGB ? rgb : ir).push_back(&a);
        }
        std::vector<bool> used(ir.size(), false);
        Assignment cur, best;
        search(rgb, ir, tol, 0, used, cur, best);
        all.links.insert(best.links.begin(), best.links.end());
        all.count += best.count;
        all.total += best.total;
    }
    return all;
}

inline Links as_links(const flame::pairing::PairingResult& r) {
    Links out;
    for (const auto& p : r.pairs) out.emplace(p.rgb.path.string(), p.thermal.path.string());
    return out;
}

/// Every asset has at most one in-window counterpart of its kind.
inline bool unambiguous(const std::vector<MediaAsset>& assets, double tol) {
    for (const auto& a : assets) {
        int n = 0;
        for (const auto& b : assets) {
            if (a.kind == b.kind && a.modality != b.modality &&
                std::abs(flame::seconds_between(a.meta.timestamp, b.meta.timestamp)) <= tol) {
                ++n;
            }
        }
        if (n > 1) return false;
    }
    return true;
}

/// Up to 6 assets per (kind, modality), clustered so both ambiguous and
/// clean sets occur.
inline std::vector<MediaAsset> random_assets(std::mt19937_64& rng, flame::Timestamp t0) {
    std::vector<MediaAsset> out;
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_int_distribution<int> ms(0, 60000);
    int serial = 0;
    for (auto kind : {flame::MediaKind::IMAGE, flame::MediaKind::VIDEO}) {
        for (auto m : {flame::Modality::RGB, flame::Modality::THERMAL}) {
            int n = count(rng);
            for (int i = 0; i < n; ++i) {
                MediaAsset a;
                a.path = "f" + std::to_string(serial++);
                a.kind = kind;
                a.modality = m;
                a.meta.modality = m;
                a.meta.timestamp = t0 + std::chrono::milliseconds(ms(rng));
                out.push_back(a);
            }
        }
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

/// Names of violated invariants; empty when all hold.
inline std::vector<std::string> check_properties(const std::vector<MediaAsset>& assets,
                                                 const flame::pairing::PairingResult& r, double tol) {
    std::vector<std::string> bad;
    std::set<std::string> seen;
    std::map<flame::MediaKind, std::size_t> paired, unmatched, total;
    for (const auto& p : r.pairs) {
        if (!seen.insert(p.rgb.path.string()).second || !seen.insert(p.thermal.path.string()).second) {
            bad.push_back("injectivity");
        }
        if (std::abs(p.delta_t) > tol + 1e-9) bad.push_back("window");
        if (std::abs(p.delta_t - dt(p.rgb, p.thermal)) > 1e-9) bad.push_back("delta_t");
        if (p.rgb.modality != flame::Modality::RGB || p.thermal.modality != flame::Modality::THERMAL) {
            bad.push_back("modality");
        }
        if (p.rgb.kind != p.thermal.kind) bad.push_back("kind");
        paired[p.rgb.kind] += 2;
    }
    for (const auto& u : r.unmatched) {
        if (!seen.insert(u.path.string()).second) bad.push_back("unmatched overlaps");
        unmatched[u.kind] += 1;
    }
    for (const auto& a : assets) total[a.kind] += 1;
    for (auto kind : {flame::MediaKind::IMAGE, flame::MediaKind::VIDEO}) {
        if (paired[kind] + unmatched[kind] != total[kind]) bad.push_back("conservation");
    }
    return bad;
}

}  // namespace oracle
