#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "polarkit/error.hpp"
#include "polarkit/geometry.hpp"
#include "polarkit/rng.hpp"

#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

using namespace polarkit;

namespace {

Detection det(double cx, double cy, PedestrianClass cls) {
    Detection d;
    d.cx = cx;
    d.cy = cy;
    d.bw = 0.1;
    d.bh = 0.2;
    d.cls = cls;
    return d;
}

DepthMap random_map(SplitMix64& rng, int max_side = 12) {
    const int w = 2 + static_cast<int>(rng.next() % max_side);
    const int h = 2 + static_cast<int>(rng.next() % max_side);
    std::vector<double> values(static_cast<std::size_t>(w) * h);
    for (auto& v : values) v = rng.next_uniform(-3.0, 7.0);
    return DepthMap(w, h, std::move(values));
}

} // namespace

TEST_CASE("depth_at corner and interpolation example") {
    DepthMap map(2, 2, {0.0, 1.0, 0.0, 1.0});
    CHECK(depth_at(map, 1.0, 0.5) == 1.0);
    CHECK(depth_at(map, 0.0, 0.5) == 0.0);
    CHECK(depth_at(map, 0.5, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("constant maps normalize to zero") {
    DepthMap map(3, 3, std::vector<double>(9, 4.2));
    CHECK(depth_at(map, 0.3, 0.8) == 0.0);
    CHECK(map.constant());
}

TEST_CASE("empty or malformed depth maps are rejected") {
    CHECK_THROWS_AS(DepthMap(0, 0, {}), Error);
    CHECK_THROWS_AS(DepthMap(2, 2, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(DepthMap(1, 2, {1.0, std::nan("")}), Error);
}

TEST_CASE("random maps agree with an independent bilinear oracle to 1e-9") {
    SplitMix64 rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = 2 + static_cast<int>(rng.next() % 10);
        const int h = 2 + static_cast<int>(rng.next() % 10);
        std::vector<double> values(static_cast<std::size_t>(w) * h);
        for (auto& v : values) v = rng.next_uniform(-5.0, 5.0);
        DepthMap map(w, h, values);
        const double cx = rng.next_double();
        const double cy = rng.next_double();
        CHECK(std::abs(depth_at(map, cx, cy) - oracles::bilinear_depth(values, w, h, cx, cy)) <
              1e-9);
    }
}

TEST_CASE("pair classification is symmetric") {
    CHECK(classify_pair(PedestrianClass::nrp, PedestrianClass::nrp) == PairType::nrp_vs_nrp);
    CHECK(classify_pair(PedestrianClass::rp, PedestrianClass::rp) == PairType::rp_vs_rp);
    CHECK(classify_pair(PedestrianClass::nrp, PedestrianClass::rp) == PairType::nrp_vs_rp);
    CHECK(classify_pair(PedestrianClass::rp, PedestrianClass::nrp) == PairType::nrp_vs_rp);
}

TEST_CASE("identical detections are at distance zero") {
    DepthMap map = DepthMap::flat();
    const auto a = det(0.4, 0.6, PedestrianClass::rp);
    CHECK(pair_distance(a, a, map) == 0.0);
}

TEST_CASE("3-4-5 triangle in normalized units") {
    DepthMap map = DepthMap::flat(1.0);
    const auto a = det(0.1, 0.1, PedestrianClass::nrp);
    const auto b = det(0.4, 0.5, PedestrianClass::rp);
    CHECK(pair_distance(a, b, map) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("random pairs match an independent norm computation to 1e-12") {
    SplitMix64 rng(32);
    for (int trial = 0; trial < 1000; ++trial) {
        DepthMap map = random_map(rng);
        const auto a = det(rng.next_double(), rng.next_double(), PedestrianClass::nrp);
        const auto b = det(rng.next_double(), rng.next_double(), PedestrianClass::rp);
        const double got = pair_distance(a, b, map);

        const double ar = map.aspect_ratio();
        const double dx = (a.cx - b.cx) * ar;
        const double dy = a.cy - b.cy;
        const double dz = depth_at(map, a.cx, a.cy) - depth_at(map, b.cx, b.cy);
        const double expected = std::sqrt(dx * dx + dy * dy + dz * dz);
        CHECK(std::abs(got - expected) < 1e-12);
    }
}

TEST_CASE("metric axioms hold on random triples") {
    SplitMix64 rng(33);
    for (int trial = 0; trial < 1000; ++trial) {
        DepthMap map = random_map(rng);
        const auto a = det(rng.next_double(), rng.next_double(), PedestrianClass::nrp);
        const auto b = det(rng.next_double(), rng.next_double(), PedestrianClass::rp);
        const auto c = det(rng.next_double(), rng.next_double(), PedestrianClass::nrp);
        const double ab = pair_distance(a, b, map);
        const double ba = pair_distance(b, a, map);
        const double ac = pair_distance(a, c, map);
        const double cb = pair_distance(c, b, map);
        CHECK(ab >= 0.0);
        CHECK(std::abs(ab - ba) < 1e-9);
        CHECK(pair_distance(a, a, map) == 0.0);
        CHECK(ab <= ac + cb + 1e-9);
    }
}

TEST_CASE("frame_pair_means on trivial scenes") {
    DepthMap map = DepthMap::flat();
    SUBCASE("zero detections") {
        const auto fd = frame_pair_means("f", {}, map);
        CHECK(!fd.nrp_vs_nrp);
        CHECK(!fd.rp_vs_rp);
        CHECK(!fd.nrp_vs_rp);
    }
    SUBCASE("one detection") {
        const std::vector<Detection> dets{det(0.5, 0.5, PedestrianClass::rp)};
        const auto fd = frame_pair_means("f", dets, map);
        CHECK(!fd.nrp_vs_nrp);
        CHECK(!fd.rp_vs_rp);
        CHECK(!fd.nrp_vs_rp);
        CHECK(fd.detection_count == 1);
    }
    SUBCASE("two NRP and one RP") {
        const std::vector<Detection> dets{det(0.1, 0.1, PedestrianClass::nrp),
                                          det(0.5, 0.1, PedestrianClass::nrp),
                                          det(0.5, 0.5, PedestrianClass::rp)};
        const auto fd = frame_pair_means("f", dets, map);
        REQUIRE(fd.nrp_vs_nrp);
        REQUIRE(fd.nrp_vs_rp);
        CHECK(!fd.rp_vs_rp);
        CHECK(*fd.nrp_vs_nrp == doctest::Approx(0.4));
        // two NRP-RP pairs: distances 0.4 and sqrt(0.32)
        CHECK(*fd.nrp_vs_rp == doctest::Approx((0.4 + std::sqrt(0.32)) / 2.0));
    }
}

TEST_CASE("frame_pair_means matches brute-force enumeration exactly") {
    SplitMix64 rng(34);
    for (int trial = 0; trial < 300; ++trial) {
        DepthMap map = random_map(rng);
        const int n = static_cast<int>(rng.next() % 13);
        std::vector<Detection> dets;
        for (int i = 0; i < n; ++i)
            dets.push_back(det(rng.next_double(), rng.next_double(),
                               rng.next_double() < 0.5 ? PedestrianClass::nrp
                                                       : PedestrianClass::rp));
        const auto fd = frame_pair_means("f", dets, map);

        std::vector<double> by_type[3];
        for (std::size_t i = 0; i < dets.size(); ++i)
            for (std::size_t j = i + 1; j < dets.size(); ++j)
                by_type[static_cast<int>(classify_pair(dets[i].cls, dets[j].cls))].push_back(
                    pair_distance(dets[i], dets[j], map));
        auto brute_mean = [&](int k) -> std::optional<double> {
            if (by_type[k].empty()) return std::nullopt;
            std::sort(by_type[k].begin(), by_type[k].end());
            double s = 0.0;
            for (double d : by_type[k]) s += d;
            return s / static_cast<double>(by_type[k].size());
        };
        CHECK(fd.nrp_vs_nrp == brute_mean(0));
        CHECK(fd.rp_vs_rp == brute_mean(1));
        CHECK(fd.nrp_vs_rp == brute_mean(2));
    }
}

TEST_CASE("means are invariant under detection reordering") {
    SplitMix64 rng(35);
    for (int trial = 0; trial < 200; ++trial) {
        DepthMap map = random_map(rng);
        std::vector<Detection> dets;
        const int n = 2 + static_cast<int>(rng.next() % 10);
        for (int i = 0; i < n; ++i)
            dets.push_back(det(rng.next_double(), rng.next_double(),
                               rng.next_double() < 0.5 ? PedestrianClass::nrp
                                                       : PedestrianClass::rp));
        const auto fd1 = frame_pair_means("f", dets, map);
        for (std::size_t i = dets.size(); i > 1; --i)
            std::swap(dets[i - 1], dets[rng.next() % i]);
        const auto fd2 = frame_pair_means("f", dets, map);
        CHECK(fd1.nrp_vs_nrp == fd2.nrp_vs_nrp);
        CHECK(fd1.rp_vs_rp == fd2.rp_vs_rp);
        CHECK(fd1.nrp_vs_rp == fd2.nrp_vs_rp);
    }
}

TEST_CASE("translation with a constant depth map preserves distances") {
    SplitMix64 rng(36);
    DepthMap map(4, 4, std::vector<double>(16, 1.0));
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = det(rng.next_uniform(0.1, 0.4), rng.next_uniform(0.1, 0.4),
                           PedestrianClass::nrp);
        const auto b = det(rng.next_uniform(0.1, 0.4), rng.next_uniform(0.1, 0.4),
                           PedestrianClass::rp);
        const double tx = rng.next_uniform(0.0, 0.5);
        const double ty = rng.next_uniform(0.0, 0.5);
        auto a2 = a;
        auto b2 = b;
        a2.cx += tx;
        a2.cy += ty;
        b2.cx += tx;
        b2.cy += ty;
        CHECK(std::abs(pair_distance(a, b, map) - pair_distance(a2, b2, map)) < 1e-12);
    }
}

TEST_CASE("ground-contact variant uses box bottoms") {
    DepthMap map = DepthMap::flat();
    auto a = det(0.2, 0.4, PedestrianClass::nrp);
    auto b = det(0.2, 0.4, PedestrianClass::rp);
    a.bh = 0.2;
    b.bh = 0.4;
    CHECK(pair_distance(a, b, map) == 0.0);
    CHECK(pair_distance(a, b, map, true) == doctest::Approx(0.1));
}

TEST_CASE("province_mean_distances skips absent fields") {
    std::vector<DistanceRecord> recs(3);
    for (auto& r : recs) r.province = "ankara";
    recs[0].nrp_vs_rp = 1.0;
    recs[1].nrp_vs_rp = std::nullopt;
    recs[2].nrp_vs_rp = 3.0;
    recs[0].rp_vs_rp = 2.0;
    const auto means = province_mean_distances(recs);
    REQUIRE(means.count("ankara"));
    CHECK(*means.at("ankara").nrp_vs_rp == doctest::Approx(2.0));
    CHECK(*means.at("ankara").rp_vs_rp == doctest::Approx(2.0));
    CHECK(!means.at("ankara").nrp_vs_nrp);
}

TEST_CASE("province_mean_distances is an identity for one record per province") {
    DistanceRecord r;
    r.province = "izmir";
    r.nrp_vs_nrp = 0.7;
    r.nrp_vs_rp = 1.3;
    const auto means = province_mean_distances({r});
    CHECK(*means.at("izmir").nrp_vs_nrp == 0.7);
    CHECK(*means.at("izmir").nrp_vs_rp == 1.3);
    CHECK(!means.at("izmir").rp_vs_rp);
}

TEST_CASE("province_mean_distances matches an independent group-by") {
    SplitMix64 rng(37);
    std::vector<DistanceRecord> recs;
    const char* provinces[] = {"ankara", "izmir", "van"};
    for (int i = 0; i < 500; ++i) {
        DistanceRecord r;
        r.province = provinces[rng.next() % 3];
        if (rng.next_double() < 0.8) r.nrp_vs_nrp = rng.next_uniform(0, 2);
        if (rng.next_double() < 0.5) r.rp_vs_rp = rng.next_uniform(0, 2);
        if (rng.next_double() < 0.9) r.nrp_vs_rp = rng.next_uniform(0, 2);
        recs.push_back(r);
    }
    const auto means = province_mean_distances(recs);
    for (const char* p : provinces) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : recs)
            if (r.province == p && r.nrp_vs_rp) {
                sum += *r.nrp_vs_rp;
                ++n;
            }
        if (n == 0)
            CHECK(!means.at(p).nrp_vs_rp);
        else
            CHECK(*means.at(p).nrp_vs_rp == sum / static_cast<double>(n));
    }
}

TEST_CASE("read_depth_map parses plain-text grids") {
    std::istringstream in("0 1 2\n3 4 5\n");
    const DepthMap map = read_depth_map(in);
    CHECK(map.width() == 3);
    CHECK(map.height() == 2);
    CHECK(depth_at(map, 1.0, 1.0) == 1.0);

    std::istringstream ragged("0 1\n2\n");
    CHECK_THROWS_AS(read_depth_map(ragged), Error);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_depth_map(empty), Error);
}

TEST_CASE("assemble_distance_records groups by frame and carries metadata") {
    std::vector<DetectionRow> rows;
    auto add = [&](const std::string& frame, double cx, PedestrianClass cls) {
        DetectionRow r;
        r.frame_id = frame;
        r.det = det(cx, 0.5, cls);
        r.province = "ankara";
        r.daynight = 1;
        r.is_summer = 0;
        rows.push_back(r);
    };
    add("f2", 0.1, PedestrianClass::nrp);
    add("f2", 0.5, PedestrianClass::rp);
    add("f1", 0.2, PedestrianClass::nrp);
    add("f1", 0.8, PedestrianClass::nrp);
    add("f3", 0.5, PedestrianClass::rp); // lone detection: no pairs

    const auto result = assemble_distance_records(
        rows, [](const std::string&) { return std::nullopt; }, 1.0, false);
    REQUIRE(result.records.size() == 2);
    CHECK(result.frames_without_pairs == 1);
    CHECK(result.records[0].frame_id == "f1"); // sorted frame order
    CHECK(result.records[1].frame_id == "f2");
    CHECK(result.records[0].province == "ankara");
    CHECK(result.records[0].daynight == 1);
    REQUIRE(result.records[0].nrp_vs_nrp);
    CHECK(*result.records[0].nrp_vs_nrp == doctest::Approx(0.6));
    REQUIRE(result.records[1].nrp_vs_rp);
}
