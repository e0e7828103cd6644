#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "biharm/exact_cases.hpp"
#include "biharm/oracle.hpp"
#include "biharm/scalar_symbols.hpp"
#include "biharm/transmission.hpp"

namespace biharm::cli {

/// Config schema or content errors; exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct ScanConfig {
    double lo = 1e-6;
    double hi = 1e6;
    std::size_t n = 241;
    std::vector<SymbolContext> parameter_sets;
};

struct ConvergenceConfig {
    Method method = Method::representation;
    std::vector<std::size_t> levels = {65, 129, 257};
};

/// A parsed run configuration. Paths are resolved against the config file's
/// directory.
struct RunConfig {
    std::shared_ptr<const GeneratorM> generator;
    CylinderGeometry geom;
    Diffusivities k;
    TransmissionProblem problem;
    /// Present when the forcing is a manufactured case.
    std::optional<ExactCase> exact;
    TransmissionOptions options;
    ScanConfig scan;
    ConvergenceConfig convergence;
    std::filesystem::path out_dir = "out";
};

struct Overrides {
    std::optional<std::string> route;
    std::optional<std::size_t> n_x;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
};

/// Parses the JSON text. `base` resolves relative paths. Throws ConfigError
/// for schema errors; section operator errors propagate unchanged.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base, const Overrides& overrides);
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides);

}  // namespace biharm::cli
