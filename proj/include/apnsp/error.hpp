#pragma once

#include <stdexcept>
#include <string>

namespace apnsp {

/// Base for every error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid graph / model / training parameters.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// sample_connected_graph ran out of attempts.
class ExhaustionError : public Error {
public:
    using Error::Error;
};

/// Stretch or stretch factor requested with coincident endpoints or an unreachable origin.
class UndefinedStretchError : public Error {
public:
    using Error::Error;
};

class UnreachableError : public Error {
public:
    using Error::Error;
};

/// Loss became NaN or infinite during training.
class TrainingError : public Error {
public:
    using Error::Error;
};

/// Malformed input file (graph, model, config, cache).
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace apnsp
