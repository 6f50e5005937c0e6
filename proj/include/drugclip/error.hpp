#pragma once

#include <stdexcept>
#include <string>

namespace drugclip {

// Every failure mode surfaced by the library. Names are stable: the CLI
// prints them and maps them to exit codes, tests assert on them.
enum class ErrorKind {
  // SMILES parsing
  EmptyInput,
  MultiFragment,
  UnbalancedParen,
  UnclosedRing,
  UnknownToken,
  SelfRingBond,
  DuplicateBond,
  InvalidBondCode,
  // ICD codes
  InvalidCodeFormat,
  UnknownCode,
  EmptyDiseaseSet,
  // numerics
  ShapeMismatch,
  NumericalError,
  NoTape,
  UnknownParameter,
  // data files
  FileNotFound,
  MalformedRow,
  DuplicateTrialId,
  DuplicateDrugId,
  UnparseableDate,
  UnsupportedVersion,
  CorruptCheckpoint,
  // training / evaluation
  EmptyDataset,
  InvalidConfig,
  InvalidDateRange,
  EmptyDrugDb,
  EmptyTestSet,
  InvalidK,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace drugclip
