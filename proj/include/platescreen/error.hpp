#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace platescreen {

// Root of every error thrown by the library. Subclasses carry the payload
// callers need to react (missing index, conflicting ids, ...).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

class GapError : public Error {
public:
    GapError(const std::string& what, int missing_index)
        : Error(what), missing_index_(missing_index) {}
    int missing_index() const noexcept { return missing_index_; }

private:
    int missing_index_;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class MergeConflictError : public Error {
public:
    MergeConflictError(const std::string& what, std::vector<std::string> ids)
        : Error(what), ids_(std::move(ids)) {}
    const std::vector<std::string>& ids() const noexcept { return ids_; }

private:
    std::vector<std::string> ids_;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

class DegenerateSpreadError : public Error {
public:
    using Error::Error;
};

class EmptySelectionError : public Error {
public:
    using Error::Error;
};

class PlacementError : public Error {
public:
    using Error::Error;
};

class NoDataError : public Error {
public:
    using Error::Error;
};

class DegenerateLabelsError : public Error {
public:
    using Error::Error;
};

class StratificationError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double condition)
        : Error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

class IncompleteFeaturesError : public Error {
public:
    IncompleteFeaturesError(const std::string& what, std::string stage)
        : Error(what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

// Too few labelled samples to train; counts are per class of the endpoint.
class InsufficientLabelsError : public Error {
public:
    InsufficientLabelsError(const std::string& what, std::map<std::string, int> counts)
        : Error(what), counts_(std::move(counts)) {}
    const std::map<std::string, int>& counts() const noexcept { return counts_; }

private:
    std::map<std::string, int> counts_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace platescreen
