#include "drugclip/error.hpp"

namespace drugclip {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::MultiFragment: return "MultiFragment";
    case ErrorKind::UnbalancedParen: return "UnbalancedParen";
    case ErrorKind::UnclosedRing: return "UnclosedRing";
    case ErrorKind::UnknownToken: return "UnknownToken";
    case ErrorKind::SelfRingBond: return "SelfRingBond";
    case ErrorKind::DuplicateBond: return "DuplicateBond";
    case ErrorKind::InvalidBondCode: return "InvalidBondCode";
    case ErrorKind::InvalidCodeFormat: return "InvalidCodeFormat";
    case ErrorKind::UnknownCode: return "UnknownCode";
    case ErrorKind::EmptyDiseaseSet: return "EmptyDiseaseSet";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NumericalError: return "NumericalError";
    case ErrorKind::NoTape: return "NoTape";
    case ErrorKind::UnknownParameter: return "UnknownParameter";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::DuplicateTrialId: return "DuplicateTrialId";
    case ErrorKind::DuplicateDrugId: return "DuplicateDrugId";
    case ErrorKind::UnparseableDate: return "UnparseableDate";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidDateRange: return "InvalidDateRange";
    case ErrorKind::EmptyDrugDb: return "EmptyDrugDb";
    case ErrorKind::EmptyTestSet: return "EmptyTestSet";
    case ErrorKind::InvalidK: return "InvalidK";
  }
  return "UnknownError";
}

}  // namespace drugclip
