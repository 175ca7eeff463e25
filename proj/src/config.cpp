#include "rydrep/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rydrep {

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> entries;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto strip = [](std::string s) {
            auto begin = s.find_first_not_of(" \t\r");
            auto end = s.find_last_not_of(" \t\r");
            return begin == std::string::npos ? std::string() : s.substr(begin, end - begin + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("config: expected key=value: " + line);
        entries[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
    }
    return entries;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_key_values(buffer.str());
}

void apply_config(EfficiencyParams& params, const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "P_R") params.P_R = std::stod(value);
        else if (key == "P_gamma") params.P_gamma = std::stod(value);
        else if (key == "P_B") params.P_B = std::stod(value);
        else if (key == "t_o") params.t_o = std::stod(value);
        else if (key == "d") params.d = std::stod(value);
        else if (key == "c_fiber") params.c_fiber = std::stod(value);
        else if (key == "n_G") params.n_G = std::stoi(value);
        else if (key == "n_T") params.n_T = std::stoi(value);
        else if (key == "n_S") params.n_S = std::stoi(value);
        else if (key == "OD") params.OD = std::stod(value);
        else throw std::invalid_argument("config: unknown key: " + key);
    }
    params.validate();
}

std::string params_to_config(const EfficiencyParams& params) {
    std::ostringstream out;
    char buf[64];
    auto emit = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s=%.17g\n", key, v);
        out << buf;
    };
    emit("P_R", params.P_R);
    emit("P_gamma", params.P_gamma);
    emit("P_B", params.P_B);
    emit("t_o", params.t_o);
    emit("d", params.d);
    emit("c_fiber", params.c_fiber);
    out << "n_G=" << params.n_G << "\nn_T=" << params.n_T << "\nn_S=" << params.n_S << '\n';
    if (params.OD) emit("OD", *params.OD);
    return out.str();
}

}  // namespace rydrep
