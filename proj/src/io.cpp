#include "predrl/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace predrl {

namespace {

int require_int(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer()) {
        throw InvalidArgument(std::string("mdp json: missing integer field '") + key + "'");
    }
    return j.at(key).get<int>();
}

void require_len(const Json& j, int n, const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) {
        throw InvalidArgument("json: " + what + " must be an array of length " + std::to_string(n));
    }
}

}  // namespace

Json table_to_json(const ActionTable<double>& table) {
    Json out = Json::array();
    for (int h = 0; h < table.horizon(); ++h) {
        Json step = Json::array();
        for (int x = 0; x < table.states(); ++x) {
            auto row = table.row(h, x);
            step.push_back(std::vector<double>(row.begin(), row.end()));
        }
        out.push_back(std::move(step));
    }
    return out;
}

ActionTable<double> table_from_json(const Json& j, int horizon, int states, int actions) {
    ActionTable<double> t(horizon, states, actions, 0.0);
    require_len(j, horizon, "table");
    for (int h = 0; h < horizon; ++h) {
        require_len(j[h], states, "table[" + std::to_string(h) + "]");
        for (int x = 0; x < states; ++x) {
            require_len(j[h][x], actions, "table[" + std::to_string(h) + "][" + std::to_string(x) + "]");
            for (int a = 0; a < actions; ++a) {
                const double v = j[h][x][a].get<double>();
                if (!std::isfinite(v)) throw InvalidArgument("json: table entries must be finite");
                t(h, x, a) = v;
            }
        }
    }
    return t;
}

Json mdp_to_json(const TabularMdp& mdp) {
    Json trans = Json::array();
    for (int h = 0; h < mdp.horizon; ++h) {
        Json step = Json::array();
        for (int x = 0; x < mdp.num_states; ++x) {
            Json state = Json::array();
            for (int a = 0; a < mdp.num_actions; ++a) state.push_back(mdp.transitions(h, x, a));
            step.push_back(std::move(state));
        }
        trans.push_back(std::move(step));
    }
    return Json{{"s", mdp.num_states},
                {"a", mdp.num_actions},
                {"h", mdp.horizon},
                {"transitions", std::move(trans)},
                {"rewards", table_to_json(mdp.rewards)},
                {"initial_states", mdp.initial_states}};
}

TabularMdp mdp_from_json(const Json& j) {
    TabularMdp m;
    m.num_states = require_int(j, "s");
    m.num_actions = require_int(j, "a");
    m.horizon = require_int(j, "h");
    if (m.num_states < 1 || m.num_actions < 1 || m.horizon < 1) {
        throw InvalidArgument("mdp json: s, a, h must be at least 1");
    }
    if (!j.contains("transitions") || !j.contains("rewards")) {
        throw InvalidArgument("mdp json: transitions and rewards are required");
    }
    const Json& tj = j.at("transitions");
    m.transitions = ActionTable<std::vector<double>>(m.horizon, m.num_states, m.num_actions);
    require_len(tj, m.horizon, "transitions");
    for (int h = 0; h < m.horizon; ++h) {
        require_len(tj[h], m.num_states, "transitions[h]");
        for (int x = 0; x < m.num_states; ++x) {
            require_len(tj[h][x], m.num_actions, "transitions[h][x]");
            for (int a = 0; a < m.num_actions; ++a) {
                require_len(tj[h][x][a], m.num_states, "transitions[h][x][a]");
                m.transitions(h, x, a) = tj[h][x][a].get<std::vector<double>>();
            }
        }
    }
    m.rewards = table_from_json(j.at("rewards"), m.horizon, m.num_states, m.num_actions);
    if (j.contains("initial_states")) {
        m.initial_states = j.at("initial_states").get<std::vector<int>>();
    } else {
        m.initial_states = {0};
    }
    m.validate();
    return m;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        // nlohmann reports "line L, column C" in its message.
        throw InvalidArgument(path + ": " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

TabularMdp load_mdp(const std::string& path) { return mdp_from_json(read_json_file(path)); }

void save_mdp(const std::string& path, const TabularMdp& mdp) {
    write_text_file(path, mdp_to_json(mdp).dump(2) + "\n");
}

std::string fmt_real(double v) {
    if (v == 0.0) return "0";  // folds -0 into 0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace predrl
