#pragma once

#include <stdexcept>
#include <string>

namespace hs2s {

// Error taxonomy used across the library. The CLI maps these onto exit
// codes: usage/argument problems -> 2, data/model/runtime problems -> 1.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error("shape: " + msg) {}
};

struct ArgumentError : std::runtime_error {
    explicit ArgumentError(const std::string& msg) : std::runtime_error("argument: " + msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error("format: " + msg) {}
};

struct StatsError : std::runtime_error {
    explicit StatsError(const std::string& msg) : std::runtime_error("stats: " + msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error("data: " + msg) {}
};

struct GradientError : std::runtime_error {
    explicit GradientError(const std::string& msg) : std::runtime_error("gradient: " + msg) {}
};

struct SelectionError : std::runtime_error {
    explicit SelectionError(const std::string& msg) : std::runtime_error("selection: " + msg) {}
};

// Checkpoint container failures.
struct CorruptionError : std::runtime_error {
    explicit CorruptionError(const std::string& msg) : std::runtime_error("corruption: " + msg) {}
};

struct VersionError : std::runtime_error {
    explicit VersionError(const std::string& msg) : std::runtime_error("version: " + msg) {}
};

struct StructureError : std::runtime_error {
    explicit StructureError(const std::string& msg) : std::runtime_error("structure: " + msg) {}
};

}  // namespace hs2s
