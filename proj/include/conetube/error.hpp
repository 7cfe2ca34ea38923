#pragma once

#include <stdexcept>
#include <string>

namespace conetube
{

/** @brief Base class of every error raised by the library */
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/** @brief Caller supplied an input that violates a documented precondition */
class ValidationError : public Error
{
public:
    using Error::Error;
};

/** @brief A numerical procedure failed on valid input */
class ComputationError : public Error
{
public:
    using Error::Error;
};

/** @brief Newton iteration or continuation did not converge */
class ConvergenceError : public ComputationError
{
public:
    using ComputationError::ComputationError;
};

/** @brief Branch continuation of sqrt/log could not be decided */
class BranchError : public ComputationError
{
public:
    using ComputationError::ComputationError;
};

/** @brief Evaluation at a singular or degenerate point */
class DomainError : public ComputationError
{
public:
    using ComputationError::ComputationError;
};

/** @brief Target left the local chart around the complete structure */
class ChartError : public ComputationError
{
public:
    using ComputationError::ComputationError;
};

}  // namespace conetube
