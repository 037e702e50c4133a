#ifndef NGSP_ERRORS_HPP
#define NGSP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ngsp {

// Base for everything thrown by the engine.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed grammar documents or structural violations (unique-parent,
// reachability, cycles). Maps to exit code 2 in the CLI.
class GrammarError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent data files (regions, labels, guides, results).
// Maps to exit code 2 in the CLI.
class DataError : public Error {
public:
    using Error::Error;
};

// External scorer process failures and out-of-contract responses.
// Maps to exit code 3 in the CLI.
class ScorerError : public Error {
public:
    using Error::Error;
};

} // namespace ngsp

#endif
