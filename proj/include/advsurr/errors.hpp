#pragma once

#include <stdexcept>
#include <string>

namespace advsurr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Radius or grid offset not an integer number of nodes.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// A function grid does not reach far enough around the mass-bearing nodes.
class CoverageError : public Error {
 public:
  using Error::Error;
};

// An attack leaves the W-infinity ball, or marginal totals disagree.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

// A hypothesis of a bound or construction does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Enumeration would exceed its configured budget.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV or config input.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace advsurr
