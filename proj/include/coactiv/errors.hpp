#pragma once

#include <stdexcept>
#include <string>

namespace coactiv {

// Base class for all domain errors raised by the toolkit. The CLI maps
// these to exit code 1; anything else escaping is a bug.
class Error : public std::runtime_error {
public:
    explicit Error(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Diagnostic classes for model/property/expression parsing. Tests assert
// on the class, not on message wording.
enum class DiagClass {
    Syntax,
    DuplicateDecl,
    OutOfBoundsInit,
    ProbabilitySum,
    UndeclaredId,
    TypeMismatch,
    Range,
};

inline const char* diag_class_name(DiagClass c) {
    switch (c) {
        case DiagClass::Syntax: return "syntax";
        case DiagClass::DuplicateDecl: return "duplicate_decl";
        case DiagClass::OutOfBoundsInit: return "out_of_bounds_init";
        case DiagClass::ProbabilitySum: return "probability_sum";
        case DiagClass::UndeclaredId: return "undeclared_id";
        case DiagClass::TypeMismatch: return "type_mismatch";
        case DiagClass::Range: return "range";
    }
    return "unknown";
}

class ParseError : public Error {
public:
    ParseError(DiagClass cls, int line, int col, const std::string& msg)
        : Error(std::string(diag_class_name(cls)) + " error at " +
                std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          cls_(cls), line_(line), col_(col), detail_(msg) {}

    DiagClass diag_class() const { return cls_; }
    int line() const { return line_; }
    int col() const { return col_; }
    const std::string& detail() const { return detail_; }

private:
    DiagClass cls_;
    int line_;
    int col_;
    std::string detail_;
};

// Semantic errors against a loaded model (bad state, overlapping guards, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

// Policy file / shape / evaluation errors.
class PolicyError : public Error {
public:
    using Error::Error;
};

// Dataset and labeling errors.
class DatasetError : public Error {
public:
    using Error::Error;
};

// Graph construction and analysis errors.
class GraphError : public Error {
public:
    using Error::Error;
};

// Pipeline/config orchestration errors; carries the failing stage name.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& msg)
        : Error("stage '" + stage + "': " + msg), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

}  // namespace coactiv
