// Error types shared across the whfemd library.
#pragma once

#include <stdexcept>
#include <string>

namespace whfemd {

/// Base class for all whfemd failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input file (WAV header, CSV manifest, JSON config).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// WAV encoding the reader does not handle.
class UnsupportedFormat : public Error {
 public:
  using Error::Error;
};

/// Audio file with no samples.
class EmptySignal : public Error {
 public:
  using Error::Error;
};

/// Manifest row whose path already appeared.
class DuplicateEntry : public Error {
 public:
  using Error::Error;
};

/// Invalid argument value (non-power-of-two FFT size, bad frequency range, ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Requested transform length shorter than the input.
class LengthError : public Error {
 public:
  using Error::Error;
};

/// Input too short for the requested analysis.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Fewer extrema than an envelope needs; sifting must stop.
class TooFewExtrema : public Error {
 public:
  using Error::Error;
};

/// Signal has no oscillatory component left to sift.
class NotOscillatory : public Error {
 public:
  using Error::Error;
};

/// All-zero or otherwise degenerate input where a ratio is undefined.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A class with fewer samples than a stratified split requires.
class StratificationError : public Error {
 public:
  using Error::Error;
};

/// SMOTE cannot synthesize from a class this small.
class SmoteError : public Error {
 public:
  using Error::Error;
};

/// Feature dimension mismatch between model and data.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure (unwritable directory, unreadable file).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace whfemd
