#pragma once

#include "polarkit/tables.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace polarkit {

enum class PedestrianClass { nrp, rp };

/// Unordered pair category: classify_pair(a,b) == classify_pair(b,a).
enum class PairType { nrp_vs_nrp, rp_vs_rp, nrp_vs_rp };

std::string_view pair_type_name(PairType t);

/// One detected pedestrian. Coordinates are normalized to the frame:
/// cx, cy in [0,1] (fractions of width/height), bw, bh in (0,1].
struct Detection {
    double cx = 0.0;
    double cy = 0.0;
    double bw = 0.0;
    double bh = 0.0;
    PedestrianClass cls = PedestrianClass::nrp;
};

/// Dense grid of relative inverse-depth values for one frame. Depth queries
/// bilinearly interpolate the grid and min-max normalize against the frame's
/// own range, so z is a relative coordinate in [0,1]; a constant map
/// normalizes to 0 everywhere.
class DepthMap {
public:
    DepthMap(int width, int height, std::vector<double> values);

    /// Flat map (z = 0 everywhere) with an explicit aspect ratio, for frames
    /// without depth data.
    static DepthMap flat(double aspect_ratio = 1.0);

    int width() const { return width_; }
    int height() const { return height_; }
    double aspect_ratio() const { return aspect_; }
    bool constant() const { return max_ == min_; }

private:
    friend double depth_at(const DepthMap&, double, double);

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
    double min_ = 0.0;
    double max_ = 0.0;
    double aspect_ = 1.0;
};

/// Normalized relative depth in [0,1] at normalized frame coordinates:
/// bilinear interpolation at (cx*(width-1), cy*(height-1)) followed by the
/// map's min-max normalization. Coordinates are clamped to the frame.
double depth_at(const DepthMap& map, double cx, double cy);

PairType classify_pair(PedestrianClass a, PedestrianClass b);

/// Relative 3D distance between two detections: the Euclidean norm of
/// (dcx * aspect, dcy, dz) with z from depth_at. With ground_contact the
/// vertical reference is the box bottom (cy + bh/2) instead of the center.
/// Unitless; relative to the frame's own depth normalization.
double pair_distance(const Detection& a, const Detection& b, const DepthMap& map,
                     bool ground_contact = false);

/// Per-pair-type mean distances for one frame. A type with no pair present
/// is absent, never zero.
struct FrameDistances {
    std::string frame_id;
    std::optional<double> nrp_vs_nrp;
    std::optional<double> rp_vs_rp;
    std::optional<double> nrp_vs_rp;
    std::size_t detection_count = 0;
};

/// Means over all unordered detection pairs, each pair counted once.
FrameDistances frame_pair_means(std::string frame_id, std::span<const Detection> dets,
                                const DepthMap& map, bool ground_contact = false);

struct PairTypeMeans {
    std::optional<double> nrp_vs_nrp;
    std::optional<double> rp_vs_rp;
    std::optional<double> nrp_vs_rp;
};

/// Arithmetic mean of each present field per province; absent fields are
/// skipped, not zero-filled.
std::map<std::string, PairTypeMeans>
province_mean_distances(const std::vector<DistanceRecord>& records);

/// Plain-text depth grid: one row of whitespace-separated reals per line,
/// all rows the same width.
DepthMap read_depth_map(std::istream& in);

/// One row of a detections file, optionally carrying frame metadata.
struct DetectionRow {
    std::string frame_id;
    Detection det;
    std::string province;             // canonical; may be empty
    std::optional<int> daynight;
    std::optional<int> is_summer;
};

struct FrameAssembly {
    std::vector<DistanceRecord> records;
    std::vector<std::string> warnings;
    std::size_t frames_without_pairs = 0;
};

/// Groups detections by frame (frames emitted in ascending frame_id order,
/// so results do not depend on input ordering), computes per-frame pair
/// means, and attaches frame metadata. Frames with no pair are skipped and
/// counted. depth_lookup returns the frame's depth map, or nullopt for a
/// flat map with default_aspect.
FrameAssembly assemble_distance_records(
    std::span<const DetectionRow> rows,
    const std::function<std::optional<DepthMap>(const std::string&)>& depth_lookup,
    double default_aspect = 1.0, bool ground_contact = false);

} // namespace polarkit
