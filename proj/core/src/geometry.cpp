#include "polarkit/geometry.hpp"

#include "polarkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

namespace polarkit {

std::string_view pair_type_name(PairType t) {
    switch (t) {
    case PairType::nrp_vs_nrp: return "nrp_vs_nrp";
    case PairType::rp_vs_rp:   return "rp_vs_rp";
    case PairType::nrp_vs_rp:  return "nrp_vs_rp";
    }
    return "?";
}

DepthMap::DepthMap(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    if (width_ <= 0 || height_ <= 0 || values_.empty())
        throw Error(errc::empty_depth_map, "depth map has no values");
    if (values_.size() != static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_))
        throw Error(errc::empty_depth_map,
                    "depth map size mismatch: " + std::to_string(values_.size()) + " values for " +
                        std::to_string(width_) + "x" + std::to_string(height_));
    for (double v : values_)
        if (!std::isfinite(v))
            throw Error(errc::value_out_of_range, "depth map contains a non-finite value");
    auto [mn, mx] = std::minmax_element(values_.begin(), values_.end());
    min_ = *mn;
    max_ = *mx;
    aspect_ = static_cast<double>(width_) / static_cast<double>(height_);
}

DepthMap DepthMap::flat(double aspect_ratio) {
    DepthMap m(2, 2, {0.0, 0.0, 0.0, 0.0});
    m.aspect_ = aspect_ratio;
    return m;
}

double depth_at(const DepthMap& map, double cx, double cy) {
    if (map.values_.empty())
        throw Error(errc::empty_depth_map, "depth query on empty map");
    if (map.constant()) return 0.0;

    const double gx = std::clamp(cx, 0.0, 1.0) * (map.width_ - 1);
    const double gy = std::clamp(cy, 0.0, 1.0) * (map.height_ - 1);
    const int x0 = static_cast<int>(gx);
    const int y0 = static_cast<int>(gy);
    const int x1 = std::min(x0 + 1, map.width_ - 1);
    const int y1 = std::min(y0 + 1, map.height_ - 1);
    const double fx = gx - x0;
    const double fy = gy - y0;

    auto at = [&](int y, int x) { return map.values_[static_cast<std::size_t>(y) * map.width_ + x]; };
    const double top = at(y0, x0) * (1.0 - fx) + at(y0, x1) * fx;
    const double bot = at(y1, x0) * (1.0 - fx) + at(y1, x1) * fx;
    const double v = top * (1.0 - fy) + bot * fy;

    return (v - map.min_) / (map.max_ - map.min_);
}

PairType classify_pair(PedestrianClass a, PedestrianClass b) {
    if (a == b)
        return a == PedestrianClass::nrp ? PairType::nrp_vs_nrp : PairType::rp_vs_rp;
    return PairType::nrp_vs_rp;
}

double pair_distance(const Detection& a, const Detection& b, const DepthMap& map,
                     bool ground_contact) {
    const double ar = map.aspect_ratio();
    const double ya = ground_contact ? a.cy + a.bh / 2.0 : a.cy;
    const double yb = ground_contact ? b.cy + b.bh / 2.0 : b.cy;
    const double dx = (a.cx - b.cx) * ar;
    const double dy = ya - yb;
    const double dz = depth_at(map, a.cx, a.cy) - depth_at(map, b.cx, b.cy);
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

FrameDistances frame_pair_means(std::string frame_id, std::span<const Detection> dets,
                                const DepthMap& map, bool ground_contact) {
    FrameDistances out;
    out.frame_id = std::move(frame_id);
    out.detection_count = dets.size();

    // Distances per type are summed in sorted order, so reordering the
    // detections cannot change the means.
    std::vector<double> dists[3];
    for (std::size_t i = 0; i < dets.size(); ++i) {
        for (std::size_t j = i + 1; j < dets.size(); ++j) {
            const auto type = classify_pair(dets[i].cls, dets[j].cls);
            dists[static_cast<int>(type)].push_back(
                pair_distance(dets[i], dets[j], map, ground_contact));
        }
    }
    auto mean = [&](PairType t) -> std::optional<double> {
        auto& v = dists[static_cast<int>(t)];
        if (v.empty()) return std::nullopt;
        std::sort(v.begin(), v.end());
        double sum = 0.0;
        for (double d : v) sum += d;
        return sum / static_cast<double>(v.size());
    };
    out.nrp_vs_nrp = mean(PairType::nrp_vs_nrp);
    out.rp_vs_rp = mean(PairType::rp_vs_rp);
    out.nrp_vs_rp = mean(PairType::nrp_vs_rp);
    return out;
}

std::map<std::string, PairTypeMeans>
province_mean_distances(const std::vector<DistanceRecord>& records) {
    struct Acc {
        double sum[3] = {0, 0, 0};
        std::size_t count[3] = {0, 0, 0};
    };
    std::map<std::string, Acc> acc;
    for (const auto& rec : records) {
        Acc& a = acc[rec.province];
        auto add = [&](int k, const std::optional<double>& v) {
            if (v) {
                a.sum[k] += *v;
                ++a.count[k];
            }
        };
        add(0, rec.nrp_vs_nrp);
        add(1, rec.rp_vs_rp);
        add(2, rec.nrp_vs_rp);
    }
    std::map<std::string, PairTypeMeans> out;
    for (const auto& [province, a] : acc) {
        PairTypeMeans m;
        if (a.count[0]) m.nrp_vs_nrp = a.sum[0] / static_cast<double>(a.count[0]);
        if (a.count[1]) m.rp_vs_rp = a.sum[1] / static_cast<double>(a.count[1]);
        if (a.count[2]) m.nrp_vs_rp = a.sum[2] / static_cast<double>(a.count[2]);
        out.emplace(province, m);
    }
    return out;
}

DepthMap read_depth_map(std::istream& in) {
    std::vector<double> values;
    int width = -1;
    int height = 0;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        double v;
        int count = 0;
        while (row >> v) {
            values.push_back(v);
            ++count;
        }
        if (count == 0) continue;
        if (width < 0)
            width = count;
        else if (count != width)
            throw Error(errc::value_out_of_range, "ragged depth grid row");
        ++height;
    }
    if (width <= 0 || height <= 0)
        throw Error(errc::empty_depth_map, "depth grid is empty");
    return DepthMap(width, height, std::move(values));
}

FrameAssembly assemble_distance_records(
    std::span<const DetectionRow> rows,
    const std::function<std::optional<DepthMap>(const std::string&)>& depth_lookup,
    double default_aspect, bool ground_contact) {
    std::map<std::string, std::vector<const DetectionRow*>> frames;
    for (const auto& row : rows) frames[row.frame_id].push_back(&row);

    FrameAssembly out;
    for (const auto& [frame_id, frame_rows] : frames) {
        std::vector<Detection> dets;
        dets.reserve(frame_rows.size());
        for (const auto* r : frame_rows) dets.push_back(r->det);

        std::optional<DepthMap> map = depth_lookup(frame_id);
        if (!map) map = DepthMap::flat(default_aspect);
        FrameDistances fd = frame_pair_means(frame_id, dets, *map, ground_contact);
        if (!fd.nrp_vs_nrp && !fd.rp_vs_rp && !fd.nrp_vs_rp) {
            ++out.frames_without_pairs;
            continue;
        }

        const DetectionRow& first = *frame_rows.front();
        for (const auto* r : frame_rows) {
            if (r->province != first.province || r->daynight != first.daynight ||
                r->is_summer != first.is_summer) {
                out.warnings.push_back("frame '" + frame_id +
                                       "': inconsistent metadata across rows, first row wins");
                break;
            }
        }
        if (!first.daynight || !first.is_summer)
            out.warnings.push_back("frame '" + frame_id +
                                   "': missing daynight/is_summer metadata, defaulting to 0");

        DistanceRecord rec;
        rec.frame_id = frame_id;
        rec.province = first.province;
        rec.nrp_vs_nrp = fd.nrp_vs_nrp;
        rec.rp_vs_rp = fd.rp_vs_rp;
        rec.nrp_vs_rp = fd.nrp_vs_rp;
        rec.daynight = first.daynight.value_or(0);
        rec.is_summer = first.is_summer.value_or(0);
        out.records.push_back(std::move(rec));
    }
    return out;
}

} // namespace polarkit
