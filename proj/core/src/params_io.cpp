#include "crsim/params_io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "crsim/errors.hpp"

namespace crsim {

namespace {

struct Field {
    const char* key;
    double EcmParams::*member;
};

constexpr std::array<Field, 14> kFields{{
    {"r_el", &EcmParams::r_el},
    {"l", &EcmParams::l},
    {"rho_m", &EcmParams::rho_m},
    {"a_fil", &EcmParams::a_fil},
    {"m_me", &EcmParams::m_me},
    {"sigma_fil", &EcmParams::sigma_fil},
    {"sigma_ion", &EcmParams::sigma_ion},
    {"dw0", &EcmParams::dw0},
    {"m_eff", &EcmParams::m_eff},
    {"t", &EcmParams::t},
    {"alpha", &EcmParams::alpha},
    {"z", &EcmParams::z},
    {"j0", &EcmParams::j0},
    {"x_min", &EcmParams::x_min},
}};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace

EcmParams parse_params(std::istream& in) {
    EcmParams p;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError("params line " + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const Field* field = nullptr;
        for (const auto& f : kFields) {
            if (key == f.key) field = &f;
        }
        if (!field) throw ArgumentError("params line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) {
            throw ArgumentError("params line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != value.size()) {
            throw ArgumentError("params line " + std::to_string(lineno) + ": bad number '" + value + "'");
        }
        p.*(field->member) = v;
    }
    p.validate();
    return p;
}

EcmParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open params file '" + path + "'");
    return parse_params(in);
}

std::string format_params(const EcmParams& p) {
    std::string out;
    char buf[64];
    for (const auto& f : kFields) {
        std::snprintf(buf, sizeof buf, "%.16e", p.*(f.member));
        out += f.key;
        out += '=';
        out += buf;
        out += '\n';
    }
    return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace crsim
