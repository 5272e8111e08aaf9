#pragma once

#include <stdexcept>
#include <string>

namespace grg {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Metric space layer.
struct MismatchedSpace : Error { using Error::Error; };
struct DegenerateTriple : Error { using Error::Error; };
struct NotUniform : Error { using Error::Error; };

// Sampling.
struct RejectionBudgetExceeded : Error { using Error::Error; };
struct EmptySample : Error { using Error::Error; };

// Graphs.
struct IndexOutOfRange : Error { using Error::Error; };

// Formula DSL.
struct SyntaxError : Error {
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};
struct UnknownSymbol : Error { using Error::Error; };
struct MissingOracle : Error { using Error::Error; };
struct UnboundVariable : Error { using Error::Error; };

// Existential-closure probing.
struct InvalidProbe : Error { using Error::Error; };
struct NotApplicable : Error { using Error::Error; };

// Structure recovery.
struct NotBallAdjacent : Error { using Error::Error; };
struct LoopNotFound : Error { using Error::Error; };
struct ApproximationFailure : Error { using Error::Error; };

// Invariant estimation and games.
struct BudgetExceeded : Error { using Error::Error; };
struct EmptyWitnessSet : Error { using Error::Error; };
struct SnapFailure : Error { using Error::Error; };
struct NotElementary : Error { using Error::Error; };

// Exact metric extension.
struct NotKatetov : Error { using Error::Error; };
struct NonPositiveEpsilon : Error { using Error::Error; };
struct IntegerDistance : Error { using Error::Error; };

}  // namespace grg
