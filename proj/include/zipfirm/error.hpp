#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zipfirm {

/// Error categories shared by every module. The CLI maps them onto exit codes.
enum class ErrorKind {
    config,             // invalid SimConfig or CLI configuration
    schema,             // CSV column mapping does not match the header
    dataset,            // empty input or dataset-level invariant broken
    deflation,          // year missing from deflator table
    snapshot_format,    // bad or unsupported snapshot header/body
    io,                 // filesystem failure
    empty_series,       // nothing to rank
    insufficient_data,  // too few points for an estimator
    degenerate_fit,     // zero regressor variance or non-decaying slope
    domain,             // argument outside mathematical domain
    range,              // non-overlapping validity ranges
    invariant,          // internal consistency violation
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace zipfirm
