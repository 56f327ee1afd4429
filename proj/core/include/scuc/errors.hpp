#pragma once

#include <stdexcept>
#include <string>

namespace scuc {

/// Malformed or inconsistent input documents (instance or schedule files).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A structurally valid document that violates a data invariant.
/// The message names the offending field and the invariant.
class InvariantError : public std::runtime_error {
public:
    explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// Network analysis failures (disconnected graph, bridge outage, singular system).
class NetworkError : public std::runtime_error {
public:
    explicit NetworkError(const std::string& what) : std::runtime_error(what) {}
};

/// Irrecoverable optimizer failures (numerical breakdown, callback failure).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scuc
