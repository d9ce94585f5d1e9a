#pragma once

#include <stdexcept>
#include <string>

namespace txsc {

struct SourceLoc {
    int line = 0;
    int col = 0;
    bool valid() const { return line > 0; }
    std::string str() const { return std::to_string(line) + ":" + std::to_string(col); }
};

class TxscError : public std::runtime_error {
public:
    explicit TxscError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Lexical or grammatical failure; carries the location and what was expected.
class SyntaxError : public TxscError {
public:
    SyntaxError(SourceLoc loc, const std::string& expected, const std::string& found)
        : TxscError("syntax error at " + loc.str() + ": expected " + expected + ", found " + found),
          loc(loc),
          expected(expected),
          found(found) {}
    SourceLoc loc;
    std::string expected;
    std::string found;
};

/// Two attributes or two functions share a name within one contract.
class DuplicateNameError : public TxscError {
public:
    DuplicateNameError(SourceLoc loc, const std::string& name, const std::string& kind)
        : TxscError("duplicate " + kind + " name '" + name + "' at " + loc.str()),
          loc(loc),
          name(name),
          kind(kind) {}
    SourceLoc loc;
    std::string name;
    std::string kind;
};

class AnalysisError : public TxscError {
public:
    using TxscError::TxscError;
};

class TransformError : public TxscError {
public:
    using TxscError::TxscError;
};

class ConfigError : public TxscError {
public:
    using TxscError::TxscError;
};

class UnknownFunctionError : public TxscError {
public:
    explicit UnknownFunctionError(const std::string& fn)
        : TxscError("unknown function '" + fn + "'") {}
};

class BoundExceededError : public TxscError {
public:
    using TxscError::TxscError;
};

/// Internal consistency failure: re-executing the chain from genesis did not
/// reproduce the materialized state.
class ReplayMismatchError : public TxscError {
public:
    using TxscError::TxscError;
};

}  // namespace txsc
