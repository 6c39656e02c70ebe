#ifndef OPINF_ERROR_HPP
#define OPINF_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opinf
{

// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Shape or dimension contract violated (mismatched rows/cols, r = 0, ...).
class DimensionError : public Error
{
public:
  using Error::Error;
};

// A value outside the domain of a map (e.g. reciprocal of a nonpositive entry).
class DomainError : public Error
{
public:
  using Error::Error;
};

// Cholesky factorization of the regularized Gram matrix broke down.
class FactorizationError : public Error
{
public:
  FactorizationError(const std::string &what, std::ptrdiff_t pivot)
    : Error(what), pivot_(pivot)
  {
  }

  // Zero-based index of the first nonpositive pivot.
  std::ptrdiff_t pivot() const { return pivot_; }

private:
  std::ptrdiff_t pivot_;
};

// Least-squares data matrix does not have full column rank.
class RankDeficientError : public Error
{
public:
  using Error::Error;
};

// d(r, m) >= k: the regression cannot be overdetermined.
class OverParameterizedError : public Error
{
public:
  using Error::Error;
};

// Every candidate regularization was disqualified.
class SearchError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

}  // namespace opinf

#endif  // OPINF_ERROR_HPP
