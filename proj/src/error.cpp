#include "zipfirm/error.hpp"

namespace zipfirm {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::config: return "config";
        case ErrorKind::schema: return "schema";
        case ErrorKind::dataset: return "dataset";
        case ErrorKind::deflation: return "deflation";
        case ErrorKind::snapshot_format: return "snapshot_format";
        case ErrorKind::io: return "io";
        case ErrorKind::empty_series: return "empty_series";
        case ErrorKind::insufficient_data: return "insufficient_data";
        case ErrorKind::degenerate_fit: return "degenerate_fit";
        case ErrorKind::domain: return "domain";
        case ErrorKind::range: return "range";
        case ErrorKind::invariant: return "invariant";
    }
    return "unknown";
}

}  // namespace zipfirm
