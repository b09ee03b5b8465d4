#pragma once

#include <stdexcept>
#include <string>

namespace stf {

/// Base class for every recoverable toolchain failure.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MergeError : public Error {
public:
    using Error::Error;
};

class DatasetError : public Error {
public:
    using Error::Error;
};

/// Raised by the ML engine (fit, predict, model files).
class MlError : public Error {
public:
    using Error::Error;
};

class BundleError : public Error {
public:
    using Error::Error;
};

class ScenarioError : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    using Error::Error;
};

class InstantiationError : public Error {
public:
    using Error::Error;
};

}  // namespace stf
