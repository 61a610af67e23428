#pragma once

#include <stdexcept>
#include <string>

namespace clarkesat {

// Malformed textual input (rationals, interval sets, partition files, CLI specs).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A query point or window outside the region an operation is defined on.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The built partition has too few stages to answer the query; extend it and retry.
class NotYetCovered : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The requested tolerance is below what the partition's stage tail allows.
class ToleranceExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace clarkesat
