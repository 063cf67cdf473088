// error.hpp — pipeline error type with stage attribution
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pulptile {

// Which pipeline stage raised the error. The CLI surfaces this in error.json.
enum class Stage { config, parse, lowering, tiler, scheduler, sim, internal };

inline std::string_view stage_name(Stage s) {
    switch (s) {
    case Stage::config: return "config";
    case Stage::parse: return "parse";
    case Stage::lowering: return "lowering";
    case Stage::tiler: return "tiler";
    case Stage::scheduler: return "scheduler";
    case Stage::sim: return "sim";
    case Stage::internal: return "internal";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Stage stage, const std::string& msg)
        : std::runtime_error(std::string(stage_name(stage)) + ": " + msg), stage_(stage), msg_(msg) {}

    Stage stage() const { return stage_; }
    const std::string& message() const { return msg_; }

private:
    Stage stage_;
    std::string msg_;
};

} // namespace pulptile
