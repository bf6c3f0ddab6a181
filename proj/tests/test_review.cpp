#include <doctest.h>

#include <chrono>
#include <httplib.h>
#include <json.hpp>
#include <random>
#include <set>
#include <thread>

#include "flame/review.hpp"
#include "flame/tiff.hpp"
#include "workspace_fixture.hpp"

using namespace flame;
using namespace flame::review;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoFailure;
}

struct LabeledWorkspace {
    testutil::TempDir dir{"review"};
    fs::path out;
    explicit LabeledWorkspace(int pairs = 10) {
        testutil::build_small_workspace(dir.path(), pairs);
        out = dir / "out";
        std::ostringstream log;
        REQUIRE(cli::cmd_label(testutil::small_config(dir.path()), log) == 0);
    }
};

ServiceOptions fixed_clock(int day = 1) {
    ServiceOptions o;
    o.clock = [day] { return make_timestamp(2024, 1, day, 12, 0, 0); };
    return o;
}

}  // namespace

TEST_CASE("queue: summaries, filters, pagination, ordering") {
    LabeledWorkspace w(10);
    ReviewService svc(w.out, fixed_clock());
    Page all = svc.list_pending(Status::ALL, 1, 50);
    CHECK(all.total == 10);
    CHECK(all.items.size() == 10);
    for (std::size_t i = 1; i < all.items.size(); ++i) {
        const auto& a = all.items[i - 1];
        const auto& b = all.items[i];
        CHECK((a.timestamp < b.timestamp || (a.timestamp == b.timestamp && a.pair_id < b.pair_id)));
    }
    for (const auto& s : all.items) {
        CHECK(s.label.has_value());
        CHECK(s.source == label::Source::AUTO);
        CHECK(s.max_temp.has_value());
        CHECK(s.camera_model == "TESTCAM");
    }
    // intents cycle fire / no fire / review over 10 pairs
    CHECK(svc.list_pending(Status::NEEDS_REVIEW).total == 3);
    CHECK(svc.list_pending(Status::FIRE).total == 4);
    CHECK(svc.list_pending(Status::NO_FIRE).total == 3);
    CHECK(svc.list_pending(Status::PENDING).total == 10);
    CHECK(svc.list_pending(Status::UNLABELED).total == 0);

    std::set<std::string> seen;
    Page p1 = svc.list_pending(Status::ALL, 1, 3);
    CHECK(p1.pages == 4);
    std::size_t total = 0;
    for (int page = 1; page <= p1.pages; ++page) {
        Page p = svc.list_pending(Status::ALL, page, 3);
        for (const auto& s : p.items) CHECK(seen.insert(s.pair_id).second);
        total += p.items.size();
    }
    CHECK(total == 10);
    CHECK(svc.list_pending(Status::ALL, 5, 3).items.empty());
    CHECK(code_of([&] { svc.list_pending(Status::ALL, 0, 3); }) == ErrorCode::InvalidArgument);
    CHECK(parse_status("no_fire") == Status::NO_FIRE);
    CHECK(code_of([] { parse_status("later"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("pagination algebra: size 2 over 5 items") {
    LabeledWorkspace w(5);
    ReviewService svc(w.out);
    Page p = svc.list_pending(Status::ALL, 1, 2);
    CHECK(p.total == 5);
    CHECK(p.pages == 3);
    std::set<std::string> ids;
    for (int k = 1; k <= 3; ++k)
        for (const auto& s : svc.list_pending(Status::ALL, k, 2).items) CHECK(ids.insert(s.pair_id).second);
    CHECK(ids.size() == 5);
}

TEST_CASE("pair assets: histogram, stats, images, unknown id") {
    LabeledWorkspace w(3);
    ReviewService svc(w.out);
    auto labels = svc.labels();
    for (const auto& row : svc.workspace().pairs) {
        PairDetail d = svc.pair_detail(row.pair_id);
        CHECK(d.stats.max_temp == labels.at(row.pair_id).max_temp);
        CHECK(d.stats.width == 64);
        CHECK(d.stats.height == 48);
        Histogram h = svc.histogram(row.pair_id);
        std::uint64_t sum = 0;
        for (auto b : h.bins) sum += b;
        CHECK(sum == 64u * 48u);
        CHECK(h.lo == d.stats.min_temp);
        CHECK(h.hi == d.stats.max_temp);
        CHECK(jpeg::decode_rgb(svc.rgb_jpeg(row.pair_id)).width == 64);
        CHECK(jpeg::decode_rgb(svc.thermal_jpeg(row.pair_id)).width == 64);
        CHECK(jpeg::decode_rgb(svc.overlay_jpeg(row.pair_id, 100.0)).height == 48);
    }
    CHECK(code_of([&] { svc.pair_detail("nope"); }) == ErrorCode::UnknownPair);
    CHECK(code_of([&] { svc.histogram("nope"); }) == ErrorCode::UnknownPair);
    CHECK(http_status(ErrorCode::UnknownPair) == 404);
    CHECK(http_status(ErrorCode::InvalidLabel) == 400);
    CHECK(http_status(ErrorCode::IoFailure) == 500);
    CHECK(json::parse(error_json(ErrorCode::UnknownPair, "x"))["code"] == "UnknownPair");
    CHECK(code_of([&] { ReviewService(w.dir / "missing"); }) == ErrorCode::WorkspaceNotFound);
}

TEST_CASE("submit: persists, survives restart, idempotent, resorts, validates") {
    LabeledWorkspace w(6);
    std::vector<std::string> log;
    ServiceOptions opt = fixed_clock(1);
    opt.log = [&](std::string_view s) { log.emplace_back(s); };
    std::string review_id;
    {
        ReviewService svc(w.out, opt);
        review_id = svc.list_pending(Status::NEEDS_REVIEW).items.at(0).pair_id;
        auto rec = svc.submit_label(review_id, "fire", "ana");
        CHECK(rec.source == label::Source::HUMAN);
        CHECK(rec.label == label::Label::FIRE);
        // on disk before return
        auto disk = label::read_labels_csv(w.out / "labels.csv");
        CHECK(disk.at(review_id).label == label::Label::FIRE);
        CHECK(disk.at(review_id).source == label::Source::HUMAN);
        CHECK(fs::exists(w.out / "Fire" / (review_id + "_rgb.jpg")));
        CHECK_FALSE(fs::exists(w.out / "NeedsReview" / (review_id + "_rgb.jpg")));
        REQUIRE(log.size() == 1);
        CHECK(log[0].find("ana") != std::string::npos);
        CHECK(read_text_file(w.out / "labels.csv").find("ana") == std::string::npos);
    }
    {
        ReviewService svc(w.out, fixed_clock(2));
        CHECK(svc.labels().at(review_id).source == label::Source::HUMAN);
        auto again = svc.submit_label(review_id, "FIRE");
        CHECK(again.decided_at == make_timestamp(2024, 1, 2, 12, 0, 0));
        std::string text = read_text_file(w.out / "labels.csv");
        std::size_t rows = 0;
        for (std::size_t p = text.find(review_id); p != std::string::npos; p = text.find(review_id, p + 1)) ++rows;
        CHECK(rows == 1);
        CHECK(code_of([&] { svc.submit_label(review_id, "maybe"); }) == ErrorCode::InvalidLabel);
        CHECK(code_of([&] { svc.submit_label(review_id, "needs_review"); }) == ErrorCode::InvalidLabel);
        CHECK(code_of([&] { svc.submit_label("nope", "fire"); }) == ErrorCode::UnknownPair);
    }
}

TEST_CASE("batch prelabel equals a library sweep and respects HUMAN records") {
    LabeledWorkspace w(9);
    fs::remove(w.out / "labels.csv");
    ReviewService svc(w.out, fixed_clock());
    CHECK(svc.progress().unlabeled == 9);

    label::ThresholdConfig cfg{60, 300};
    std::map<label::Label, std::size_t> expect;
    for (const auto& row : svc.workspace().pairs) {
        TemperatureRaster r = tiff::read_tiff(w.out / "tiff" / (row.pair_id + ".tiff"));
        ++expect[label::auto_label(r, cfg).label];
    }
    auto first = svc.batch_prelabel(cfg);
    for (auto l : {label::Label::FIRE, label::Label::NO_FIRE, label::Label::NEEDS_REVIEW}) {
        CHECK(first.counts[l] == expect[l]);
    }
    CHECK(first.changed == 9);
    auto second = svc.batch_prelabel(cfg);
    CHECK(second.changed == 0);

    std::string id = svc.workspace().pairs.front().pair_id;
    svc.submit_label(id, "discard");
    auto third = svc.batch_prelabel(label::ThresholdConfig{10, 20});
    CHECK(third.human_kept == 1);
    CHECK(svc.labels().at(id).label == label::Label::DISCARD);
    CHECK(svc.labels().at(id).source == label::Source::HUMAN);
}

TEST_CASE("random op sequences keep HUMAN precedence and exact counters") {
    LabeledWorkspace w(8);
    ReviewService svc(w.out, fixed_clock());
    std::mt19937_64 rng(13);
    std::map<std::string, label::Label> human;
    const auto& pairs = svc.workspace().pairs;
    const char* names[] = {"fire", "no_fire", "discard"};
    const label::Label values[] = {label::Label::FIRE, label::Label::NO_FIRE, label::Label::DISCARD};
    for (int step = 0; step < 40; ++step) {
        if (rng() % 3 == 0) {
            double lo = 20 + double(rng() % 200);
            svc.batch_prelabel({lo, lo + 1 + double(rng() % 300)});
        } else {
            const auto& id = pairs[rng() % pairs.size()].pair_id;
            int k = int(rng() % 3);
            svc.submit_label(id, names[k]);
            human[id] = values[k];
        }
        auto disk = label::read_labels_csv(w.out / "labels.csv");  // parseable after every op
        for (const auto& [id, l] : human) {
            CHECK(disk.at(id).source == label::Source::HUMAN);
            CHECK(disk.at(id).label == l);
        }
        Progress p = svc.progress();
        std::size_t sum = p.unlabeled;
        for (const auto& [l, n] : p.per_label) sum += n;
        CHECK(sum == p.total);
        CHECK(p.total == pairs.size());
        CHECK(p.human == human.size());
        CHECK(p.pending + p.human == p.total);
        std::map<label::Label, std::size_t> recount;
        for (const auto& row : pairs)
            if (disk.count(row.pair_id)) ++recount[disk.at(row.pair_id).label];
        for (auto l : label::kAllLabels) CHECK(p.per_label[l] == recount[l]);
    }
}

TEST_CASE("http routes") {
    LabeledWorkspace w(4);
    ReviewService svc(w.out, fixed_clock());
    httplib::Server server;
    mount_routes(server, svc);
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client c("127.0.0.1", port);
    c.set_connection_timeout(2);

    auto list = c.Get("/api/pairs?status=all&page=1&page_size=3");
    REQUIRE(list);
    CHECK(list->status == 200);
    json j = json::parse(list->body);
    CHECK(j["total"] == 4);
    CHECK(j["pages"] == 2);
    CHECK(j["items"].size() == 3);
    std::string id = j["items"][0]["pair_id"];

    auto detail = c.Get("/api/pairs/" + id);
    REQUIRE(detail);
    CHECK(detail->status == 200);
    CHECK(json::parse(detail->body)["pair_id"] == id);

    for (std::string img : {"rgb.jpg", "thermal.jpg", "overlay.jpg?threshold=150"}) {
        auto r = c.Get("/api/pairs/" + id + "/" + img);
        REQUIRE(r);
        CHECK(r->status == 200);
        CHECK(r->get_header_value("Content-Type") == "image/jpeg");
        CHECK(jpeg::has_magic(as_bytes(r->body)));
    }
    auto hist = c.Get("/api/pairs/" + id + "/histogram");
    REQUIRE(hist);
    json h = json::parse(hist->body);
    std::uint64_t sum = 0;
    for (auto& b : h["bins"]) sum += b.get<std::uint64_t>();
    CHECK(sum == 64u * 48u);
    CHECK(h["bins"].size() == 256);

    auto missing = c.Get("/api/pairs/deadbeef");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body)["code"] == "UnknownPair");

    auto bad = c.Post("/api/pairs/" + id + "/label", R"({"label":"maybe"})", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    auto ok = c.Post("/api/pairs/" + id + "/label", R"({"label":"no_fire","reviewer":"kim"})", "application/json");
    REQUIRE(ok);
    CHECK(ok->status == 200);
    CHECK(json::parse(ok->body)["source"] == "HUMAN");
    CHECK(label::read_labels_csv(w.out / "labels.csv").at(id).label == label::Label::NO_FIRE);

    auto pre = c.Post("/api/prelabel", R"({"no_fire_max":80,"fire_min":200})", "application/json");
    REQUIRE(pre);
    CHECK(pre->status == 200);
    CHECK(json::parse(pre->body)["human_kept"] == 1);
    auto badpre = c.Post("/api/prelabel", R"({"no_fire_max":300,"fire_min":200})", "application/json");
    REQUIRE(badpre);
    CHECK(badpre->status == 400);

    auto prog = c.Get("/api/progress");
    REQUIRE(prog);
    json p = json::parse(prog->body);
    CHECK(p["total"] == 4);
    CHECK(p["human"] == 1);
    CHECK(p["per_label"]["NO_FIRE"].get<int>() >= 1);

    server.stop();
    t.join();
}
