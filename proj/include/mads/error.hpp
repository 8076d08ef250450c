#pragma once

// Error taxonomy shared by all mads modules. Every failure carries a code so
// callers (and the CLI exit-code mapping) can dispatch without string matching.

#include <stdexcept>
#include <string>

namespace mads {

enum class errc {
  // geometry / numeric
  dim_mismatch,
  empty_sequence,
  zero_norm_vector,
  non_finite_input,
  not_symmetric,
  eigen_failure,
  numerical_bounds_violation,
  too_few_points,
  length_mismatch,
  // training
  insufficient_groups,
  degenerate_batch,
  zero_norm_row,
  no_valid_triplets,
  shape_mismatch,
  // benchmark construction
  insufficient_speakers,
  insufficient_utterances,
  insufficient_classes,
  empty_distribution,
  incomplete_table,
  missing_embedding,
  // containers / files
  corrupt_header,
  version_unsupported,
  checksum_mismatch,
  duplicate_id,
  io_failure,
  parse_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::dim_mismatch: return "DimMismatch";
    case errc::empty_sequence: return "EmptySequence";
    case errc::zero_norm_vector: return "ZeroNormVector";
    case errc::non_finite_input: return "NonFiniteInput";
    case errc::not_symmetric: return "NotSymmetric";
    case errc::eigen_failure: return "EigenFailure";
    case errc::numerical_bounds_violation: return "NumericalBoundsViolation";
    case errc::too_few_points: return "TooFewPoints";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::insufficient_groups: return "InsufficientGroups";
    case errc::degenerate_batch: return "DegenerateBatch";
    case errc::zero_norm_row: return "ZeroNormRow";
    case errc::no_valid_triplets: return "NoValidTriplets";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::insufficient_speakers: return "InsufficientSpeakers";
    case errc::insufficient_utterances: return "InsufficientUtterances";
    case errc::insufficient_classes: return "InsufficientClasses";
    case errc::empty_distribution: return "EmptyDistribution";
    case errc::incomplete_table: return "IncompleteTable";
    case errc::missing_embedding: return "MissingEmbedding";
    case errc::corrupt_header: return "CorruptHeader";
    case errc::version_unsupported: return "VersionUnsupported";
    case errc::checksum_mismatch: return "ChecksumMismatch";
    case errc::duplicate_id: return "DuplicateId";
    case errc::io_failure: return "IoFailure";
    case errc::parse_error: return "ParseError";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace mads
