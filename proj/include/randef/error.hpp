#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace randef {

enum class Errc {
    InvalidArgument,
    InvalidSequence,
    MalformedBits,
    InvalidDecode,
    ZeroProbabilityBlock,
    IncompatibleModels,
    NegativeCost,
    NoAdmissibleModel,
    EmptyString,
    NoTypicalSample,
    DegenerateModel,
    NotFoundWithinBudget,
    ParseError,
    DuplicateNumberInDraw,
    OutOfRange,
    EmptyCorpus,
    BudgetExceeded,
    BandUnsatisfiable,
    TooFewCandidates,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::InvalidSequence: return "InvalidSequence";
        case Errc::MalformedBits: return "MalformedBits";
        case Errc::InvalidDecode: return "InvalidDecode";
        case Errc::ZeroProbabilityBlock: return "ZeroProbabilityBlock";
        case Errc::IncompatibleModels: return "IncompatibleModels";
        case Errc::NegativeCost: return "NegativeCost";
        case Errc::NoAdmissibleModel: return "NoAdmissibleModel";
        case Errc::EmptyString: return "EmptyString";
        case Errc::NoTypicalSample: return "NoTypicalSample";
        case Errc::DegenerateModel: return "DegenerateModel";
        case Errc::NotFoundWithinBudget: return "NotFoundWithinBudget";
        case Errc::ParseError: return "ParseError";
        case Errc::DuplicateNumberInDraw: return "DuplicateNumberInDraw";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::EmptyCorpus: return "EmptyCorpus";
        case Errc::BudgetExceeded: return "BudgetExceeded";
        case Errc::BandUnsatisfiable: return "BandUnsatisfiable";
        case Errc::TooFewCandidates: return "TooFewCandidates";
    }
    return "Unknown";
}

/// Every domain failure in the library is reported as an Error carrying a
/// machine-readable code. The CLI maps these to exit status 1.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

    Errc code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    Errc code_;
    std::string detail_;
};

} // namespace randef
