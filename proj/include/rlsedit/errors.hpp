#pragma once

#include <stdexcept>
#include <string>

namespace rlsedit {

// Base of every library failure. NumericError and IoError split the
// taxonomy the way the CLI maps exit codes (3 = numerical, 4 = I/O).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

// Invalid arguments / invalid configuration (CLI exit code 2).
class UsageError : public Error {
public:
  using Error::Error;
};

#define RLSEDIT_DEFINE_ERROR(NAME, BASE)                                      \
  class NAME : public BASE {                                                  \
  public:                                                                     \
    using BASE::BASE;                                                         \
  }

RLSEDIT_DEFINE_ERROR(ShapeMismatch, NumericError);
RLSEDIT_DEFINE_ERROR(NotSquare, NumericError);
RLSEDIT_DEFINE_ERROR(NotSymmetric, NumericError);
RLSEDIT_DEFINE_ERROR(NotPositiveDefinite, NumericError);
RLSEDIT_DEFINE_ERROR(SingularFactor, NumericError);
RLSEDIT_DEFINE_ERROR(SingularInit, NumericError);
RLSEDIT_DEFINE_ERROR(InnerNotPD, NumericError);
RLSEDIT_DEFINE_ERROR(SingularSystem, NumericError);
RLSEDIT_DEFINE_ERROR(RankDeficientEdit, NumericError);
RLSEDIT_DEFINE_ERROR(EmptyAnchor, NumericError);
RLSEDIT_DEFINE_ERROR(LambdaZero, NumericError);
RLSEDIT_DEFINE_ERROR(MuZero, NumericError);
RLSEDIT_DEFINE_ERROR(FlaggedAnchor, NumericError);

RLSEDIT_DEFINE_ERROR(BadMagic, IoError);
RLSEDIT_DEFINE_ERROR(VersionMismatch, IoError);
RLSEDIT_DEFINE_ERROR(TruncatedFile, IoError);
RLSEDIT_DEFINE_ERROR(ChecksumMismatch, IoError);
RLSEDIT_DEFINE_ERROR(ModeMismatch, IoError);
RLSEDIT_DEFINE_ERROR(SchemaMismatch, IoError);
RLSEDIT_DEFINE_ERROR(MissingTrace, IoError);

#undef RLSEDIT_DEFINE_ERROR

} // namespace rlsedit
