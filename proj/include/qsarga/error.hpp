#pragma once

#include <stdexcept>
#include <string>

namespace qsarga {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration, topology, or flag values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (CSV tables, activity files, genotype strings).
class DataError : public Error {
public:
    using Error::Error;
};

/// Design matrix is rank deficient; distinct from a fitted-but-invalid model.
class SingularFit : public Error {
public:
    using Error::Error;
};

/// The provider could not supply enough viable, distinct genotypes.
class InsufficientViable : public Error {
public:
    using Error::Error;
};

} // namespace qsarga
