#pragma once

#include <stdexcept>
#include <string>

namespace mq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ZeroProbabilityOutcome : public Error {
public:
    using Error::Error;
};

class NonInvertibleMap : public Error {
public:
    using Error::Error;
};

class DepthTooLarge : public Error {
public:
    using Error::Error;
};

class ProjectiveParameters : public Error {
public:
    using Error::Error;
};

class IndivisibleGrid : public Error {
public:
    using Error::Error;
};

class TooFewLevels : public Error {
public:
    using Error::Error;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class NotProjective : public Error {
public:
    using Error::Error;
};

class NotDoubleProjective : public Error {
public:
    using Error::Error;
};

class NotShiftCase : public Error {
public:
    using Error::Error;
};

}  // namespace mq
