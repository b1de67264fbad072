// Copyright 2026 the canopyhm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CHM_ERROR_HPP_
#define CHM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace chm {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or inconsistent caller-supplied parameter.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Malformed input file (CSV row, header, payload size, ...).
class ParseError : public Error {
public:
    using Error::Error;
};

// File exists but uses a format variant we do not handle.
class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

// Payload inconsistent with its own metadata (truncation, size mismatch).
class CorruptFileError : public Error {
public:
    using Error::Error;
};

// Input too small / collinear / empty for the requested geometry op.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

// Two rasters expected on the same grid are not.
class AlignmentError : public Error {
public:
    using Error::Error;
};

// Tensor shapes disagree.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Checkpoint exists but belongs to a different config or version.
class IncompatibleCheckpointError : public Error {
public:
    using Error::Error;
};

// Training produced a non-finite loss.
class DivergedTrainingError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace chm

#endif // CHM_ERROR_HPP_
