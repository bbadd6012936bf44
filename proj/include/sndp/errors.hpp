#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sndp {

// Root of every exception thrown by the library. Callers that only need to
// report a failure can catch this; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InstanceErrc {
  kNegativeWeight,
  kWeightTooLarge,
  kSelfLoop,
  kDuplicateEdge,
  kNodeOutOfRange,
  kNegativeRequirement,
  kRequirementUnsatisfiable,
};

inline const char* to_string(InstanceErrc c) {
  switch (c) {
    case InstanceErrc::kNegativeWeight: return "NegativeWeight";
    case InstanceErrc::kWeightTooLarge: return "WeightTooLarge";
    case InstanceErrc::kSelfLoop: return "SelfLoop";
    case InstanceErrc::kDuplicateEdge: return "DuplicateEdge";
    case InstanceErrc::kNodeOutOfRange: return "NodeOutOfRange";
    case InstanceErrc::kNegativeRequirement: return "NegativeRequirement";
    case InstanceErrc::kRequirementUnsatisfiable: return "RequirementUnsatisfiable";
  }
  return "Unknown";
}

class InstanceError : public Error {
 public:
  InstanceError(InstanceErrc code, const std::string& detail)
      : Error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  InstanceErrc code() const noexcept { return code_; }

 private:
  InstanceErrc code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail)
      : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

enum class CongestErrc {
  kMessageTooLarge,
  kNonTermination,
  kInvalidDestination,
  kDuplicateMessage,
  kInvalidBandwidth,
};

class CongestError : public Error {
 public:
  CongestError(CongestErrc code, const std::string& detail)
      : Error(detail), code_(code) {}
  CongestErrc code() const noexcept { return code_; }

 private:
  CongestErrc code_;
};

class MessageTooLarge : public CongestError {
 public:
  MessageTooLarge(std::uint32_t from, std::uint32_t to, std::size_t bits,
                  std::size_t cap)
      : CongestError(CongestErrc::kMessageTooLarge,
                     "MessageTooLarge: " + std::to_string(from) + " -> " +
                         std::to_string(to) + " carries " +
                         std::to_string(bits) + " bits (cap " +
                         std::to_string(cap) + ")"),
        from_(from), to_(to), bits_(bits) {}
  std::uint32_t from() const noexcept { return from_; }
  std::uint32_t to() const noexcept { return to_; }
  std::size_t bits() const noexcept { return bits_; }

 private:
  std::uint32_t from_;
  std::uint32_t to_;
  std::size_t bits_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class UnreachableSource : public Error {
 public:
  explicit UnreachableSource(std::uint32_t node)
      : Error("UnreachableSource: node " + std::to_string(node) +
              " has no finite distance to any source"),
        node_(node) {}
  std::uint32_t node() const noexcept { return node_; }

 private:
  std::uint32_t node_;
};

class DisconnectedUnderFiniteWeights : public Error {
 public:
  using Error::Error;
};

class SearchSpaceTooLarge : public Error {
 public:
  using Error::Error;
};

// Raised when a cross-check inside the pipeline fails (nodes disagree, a
// produced forest violates its definition, ...). Indicates a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace sndp
