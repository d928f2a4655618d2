#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polarkit {

/// Failure categories used across the toolkit. Each maps to one of the
/// process exit codes: data (1), config (2), numeric (3).
enum class errc {
    malformed_header,
    value_out_of_range,
    duplicate_key,
    unmatched_province,
    invalid_distribution,
    length_mismatch,
    weight_out_of_range,
    missing_profile,
    zero_total_gdp,
    empty_depth_map,
    missing_column,
    empty_after_filtering,
    baseline_level_absent,
    rank_deficient,
    invalid_config,
    io_error,
};

constexpr std::string_view errc_name(errc c) {
    switch (c) {
    case errc::malformed_header:      return "MalformedHeader";
    case errc::value_out_of_range:    return "ValueOutOfRange";
    case errc::duplicate_key:         return "DuplicateKey";
    case errc::unmatched_province:    return "UnmatchedProvince";
    case errc::invalid_distribution:  return "InvalidDistribution";
    case errc::length_mismatch:       return "LengthMismatch";
    case errc::weight_out_of_range:   return "WeightOutOfRange";
    case errc::missing_profile:       return "MissingProfile";
    case errc::zero_total_gdp:        return "ZeroTotalGdp";
    case errc::empty_depth_map:       return "EmptyDepthMap";
    case errc::missing_column:        return "MissingColumn";
    case errc::empty_after_filtering: return "EmptyAfterFiltering";
    case errc::baseline_level_absent: return "BaselineLevelAbsent";
    case errc::rank_deficient:        return "RankDeficient";
    case errc::invalid_config:        return "InvalidConfig";
    case errc::io_error:              return "IoError";
    }
    return "UnknownError";
}

/// Process exit code for an error category: 1 data, 2 config, 3 numeric.
constexpr int errc_exit_code(errc c) {
    switch (c) {
    case errc::invalid_config:
    case errc::missing_column:
    case errc::baseline_level_absent:
    case errc::io_error:
        return 2;
    case errc::rank_deficient:
        return 3;
    default:
        return 1;
    }
}

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }
    int exit_code() const noexcept { return errc_exit_code(code_); }

private:
    errc code_;
};

} // namespace polarkit
