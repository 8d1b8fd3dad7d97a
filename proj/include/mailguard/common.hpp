#pragma once

#include <stdexcept>
#include <string>

namespace mailguard {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Corpus file could not be read, or a record violates its invariants.
class CorpusError : public Error {
public:
  using Error::Error;
};

// Summary text failed strict schema validation.
class SchemaError : public Error {
public:
  using Error::Error;
};

// Pattern file is malformed or a regex does not compile.
class PatternError : public Error {
public:
  using Error::Error;
};

// Episode construction or tool precondition failure.
class EnvironmentError : public Error {
public:
  using Error::Error;
};

// Model backend failure (transport, protocol, unparseable payload).
class BackendError : public Error {
public:
  using Error::Error;
};

// Campaign-level failure (bad run spec, unwritable output, result mismatch).
class CampaignError : public Error {
public:
  using Error::Error;
};

} // namespace mailguard
