#pragma once

#include <stdexcept>
#include <string>

namespace sid {

// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// matrix / store
struct DimensionMismatch : Error { using Error::Error; };
struct SerializationError : Error { using Error::Error; };
struct DuplicateKey : Error { using Error::Error; };
struct MissingKey : Error { using Error::Error; };

// hankel
struct InsufficientData : Error { using Error::Error; };
struct InvalidShape : Error { using Error::Error; };

// tsvd
struct ConvergenceFailure : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };

// n4sid
struct OrderZero : Error { using Error::Error; };
struct RankDeficientGamma : Error { using Error::Error; };

// dagflow
struct InvalidParallelism : Error { using Error::Error; };
struct CycleDetected : Error { using Error::Error; };
struct DanglingDependency : Error { using Error::Error; };
struct TemplateSyntaxError : Error { using Error::Error; };
struct TemplateSchemaError : Error { using Error::Error; };

// executor
struct NoNodes : Error { using Error::Error; };
struct TaskFailed : Error { using Error::Error; };
struct DeadlockDetected : Error { using Error::Error; };

// bench
struct InvalidPartition : Error { using Error::Error; };
struct ZeroParallelTime : Error { using Error::Error; };

}  // namespace sid
