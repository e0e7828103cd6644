#include "biharm/modal_forcing.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <utility>

#include "biharm/section_operator.hpp"

namespace biharm {

double interpolate_uniform(const double* y, std::size_t count, double left, double right, double x) {
    if (count < 4) {
        throw ResolutionError("cubic interpolation needs at least 4 samples");
    }
    const std::size_t cells = count - 1;
    const double h = (right - left) / static_cast<double>(cells);
    const double s = (x - left) / h;
    auto cell = static_cast<std::ptrdiff_t>(std::floor(s));
    cell = std::clamp<std::ptrdiff_t>(cell, 0, static_cast<std::ptrdiff_t>(cells) - 1);
    if (s == static_cast<double>(cell)) {
        return y[cell];
    }
    const std::ptrdiff_t k0 = std::clamp<std::ptrdiff_t>(cell - 1, 0, static_cast<std::ptrdiff_t>(cells) - 3);
    double result = 0.0;
    for (std::ptrdiff_t i = 0; i < 4; ++i) {
        double weight = 1.0;
        for (std::ptrdiff_t j = 0; j < 4; ++j) {
            if (j != i) {
                weight *= (s - static_cast<double>(k0 + j)) / static_cast<double>(i - j);
            }
        }
        result += weight * y[k0 + i];
    }
    return result;
}

ModalForcing ModalForcing::zero() {
    ModalForcing f;
    f.fn_ = [](Side, std::size_t, double) { return 0.0; };
    f.tag_ = "zero";
    f.zero_ = true;
    return f;
}

ModalForcing ModalForcing::from_function(Function fn, std::string tag) {
    ModalForcing f;
    f.fn_ = std::move(fn);
    f.tag_ = std::move(tag);
    return f;
}

ModalForcing ModalForcing::from_samples(const CylinderGeometry& geom, std::vector<std::vector<double>> minus_samples,
                                        std::vector<std::vector<double>> plus_samples) {
    std::size_t count = 0;
    for (const auto* group : {&minus_samples, &plus_samples}) {
        for (const auto& samples : *group) {
            if (samples.empty()) {
                continue;
            }
            if (count == 0) {
                count = samples.size();
            } else if (samples.size() != count) {
                throw InputError("modal forcing samples must have equal counts on every mode and side");
            }
            for (const double v : samples) {
                if (!std::isfinite(v)) {
                    throw InputError("modal forcing samples must be finite");
                }
            }
        }
    }
    if (count != 0 && count < 4) {
        throw InputError("modal forcing needs at least 4 samples per mode");
    }
    auto data = std::make_shared<const std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>>>(
        std::move(minus_samples), std::move(plus_samples));
    ModalForcing f;
    f.tag_ = "samples";
    f.zero_ = count == 0;
    f.fn_ = [data, geom](Side side, std::size_t mode, double x) {
        const auto& group = side == Side::minus ? data->first : data->second;
        if (mode >= group.size() || group[mode].empty()) {
            return 0.0;
        }
        const auto& y = group[mode];
        return interpolate_uniform(y.data(), y.size(), geom.left(side), geom.right(side), x);
    };
    return f;
}

ModalForcing ModalForcing::sine(const SectionOperator& section, const CylinderGeometry& geom, bool minus, bool plus,
                                int wave) {
    if (wave <= 0) {
        throw PreconditionError("sine forcing needs a positive wave number");
    }
    const Vector mu = section.eigenvalues();
    ModalForcing f;
    f.zero_ = !minus && !plus;
    f.tag_ = "sine " + std::to_string(wave);
    f.fn_ = [mu, geom, minus, plus, wave](Side side, std::size_t mode, double x) {
        if ((side == Side::minus && !minus) || (side == Side::plus && !plus) ||
            mode >= static_cast<std::size_t>(mu.size())) {
            return 0.0;
        }
        const double k = wave * std::numbers::pi / geom.length(side);
        const double q = k * k - mu(static_cast<Eigen::Index>(mode));
        return q * q * std::sin(k * (x - geom.left(side)));
    };
    return f;
}

double ModalForcing::operator()(Side side, std::size_t mode, double x) const { return fn_(side, mode, x); }

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char ch) { return !std::isspace(ch); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(trim(field));
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_number(const std::string& token, std::size_t line_no) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size() || token.empty() || !std::isfinite(value)) {
        throw InputError("forcing CSV line " + std::to_string(line_no) + ": malformed number '" + token + "'");
    }
    return value;
}

}  // namespace

ModalForcing parse_modal_forcing_csv(const std::string& text, const CylinderGeometry& geom, std::size_t modes) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> column;
    bool have_header = false;
    // (side, mode) -> (x, value) pairs
    std::map<std::pair<int, std::size_t>, std::vector<std::pair<double, double>>> groups;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (!have_header) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                column[fields[i]] = i;
            }
            for (const char* name : {"x", "mode_index", "value", "side"}) {
                if (!column.count(name)) {
                    throw InputError(std::string("forcing CSV header lacks column '") + name + "'");
                }
            }
            have_header = true;
            continue;
        }
        if (fields.size() != column.size()) {
            throw InputError("forcing CSV line " + std::to_string(line_no) + ": wrong field count");
        }
        const double x = parse_number(fields[column["x"]], line_no);
        const double mode_value = parse_number(fields[column["mode_index"]], line_no);
        const double value = parse_number(fields[column["value"]], line_no);
        const std::string& side_name = fields[column["side"]];
        if (mode_value < 0 || mode_value != std::floor(mode_value) || mode_value >= static_cast<double>(modes)) {
            throw InputError("forcing CSV line " + std::to_string(line_no) + ": mode_index out of range");
        }
        int side = 0;
        if (side_name == "minus") {
            side = 0;
        } else if (side_name == "plus") {
            side = 1;
        } else {
            throw InputError("forcing CSV line " + std::to_string(line_no) + ": side must be minus or plus");
        }
        groups[{side, static_cast<std::size_t>(mode_value)}].emplace_back(x, value);
    }
    if (!have_header) {
        throw InputError("forcing CSV is empty");
    }

    std::vector<std::vector<double>> minus(modes);
    std::vector<std::vector<double>> plus(modes);
    for (auto& [key, samples] : groups) {
        const Side side = key.first == 0 ? Side::minus : Side::plus;
        std::sort(samples.begin(), samples.end());
        const std::size_t n = samples.size();
        if (n < 4) {
            throw InputError("forcing CSV: each (side, mode) group needs at least 4 samples");
        }
        const double left = geom.left(side);
        const double len = geom.length(side);
        for (std::size_t i = 0; i < n; ++i) {
            const double expected = left + len * static_cast<double>(i) / static_cast<double>(n - 1);
            if (std::abs(samples[i].first - expected) > 1e-9 * std::max(1.0, len)) {
                throw InputError(std::string("forcing CSV: samples of side ") + to_string(side) +
                                 " are not on a uniform grid spanning the interval");
            }
        }
        auto& target = (side == Side::minus ? minus : plus)[key.second];
        target.reserve(n);
        for (const auto& s : samples) {
            target.push_back(s.second);
        }
    }
    return ModalForcing::from_samples(geom, std::move(minus), std::move(plus));
}

ModalForcing read_modal_forcing_csv(const std::string& path, const CylinderGeometry& geom, std::size_t modes) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open forcing CSV: " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_modal_forcing_csv(buffer.str(), geom, modes);
}

}  // namespace biharm
