#include "cesaro/system_model.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "cesaro/csv_io.hpp"

namespace cesaro {

std::optional<StateIndex> TransitionSystem::find_state(std::string_view name) const {
    auto it = state_lookup_.find(std::string(name));
    if (it == state_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<InputIndex> TransitionSystem::find_input(std::string_view name) const {
    auto it = input_lookup_.find(std::string(name));
    if (it == input_lookup_.end()) return std::nullopt;
    return it->second;
}

const Arc* TransitionSystem::find_arc(StateIndex x, InputIndex u) const {
    const auto& row = arcs_.at(x);
    auto it = std::lower_bound(row.begin(), row.end(), u,
                               [](const Arc& a, InputIndex v) { return a.input < v; });
    if (it == row.end() || it->input != u) return nullptr;
    return &*it;
}

StateIndex SystemBuilder::declare_state(std::string_view name, std::vector<double> coord) {
    auto found = sys_.find_state(name);
    if (found) {
        if (state_explicit_[*found])
            throw ParseError("state '" + std::string(name) + "' declared twice");
        state_explicit_[*found] = true;
        sys_.state_coords_[*found] = std::move(coord);
        return *found;
    }
    StateIndex idx = state(name);
    state_explicit_[idx] = true;
    sys_.state_coords_[idx] = std::move(coord);
    return idx;
}

InputIndex SystemBuilder::declare_input(std::string_view name, std::vector<double> coord) {
    auto found = sys_.find_input(name);
    if (found) {
        if (input_explicit_[*found])
            throw ParseError("input '" + std::string(name) + "' declared twice");
        input_explicit_[*found] = true;
        sys_.input_coords_[*found] = std::move(coord);
        return *found;
    }
    InputIndex idx = input(name);
    input_explicit_[idx] = true;
    sys_.input_coords_[idx] = std::move(coord);
    return idx;
}

StateIndex SystemBuilder::state(std::string_view name) {
    auto found = sys_.find_state(name);
    if (found) return *found;
    StateIndex idx = static_cast<StateIndex>(sys_.state_names_.size());
    sys_.state_names_.emplace_back(name);
    sys_.state_coords_.emplace_back();
    sys_.arcs_.emplace_back();
    sys_.state_lookup_.emplace(std::string(name), idx);
    state_explicit_.push_back(false);
    return idx;
}

InputIndex SystemBuilder::input(std::string_view name) {
    auto found = sys_.find_input(name);
    if (found) return *found;
    InputIndex idx = static_cast<InputIndex>(sys_.input_names_.size());
    sys_.input_names_.emplace_back(name);
    sys_.input_coords_.emplace_back();
    sys_.input_lookup_.emplace(std::string(name), idx);
    input_explicit_.push_back(false);
    return idx;
}

void SystemBuilder::add_transition(StateIndex from, InputIndex input, StateIndex to, double cost) {
    if (from < 0 || from >= sys_.num_states())
        throw UnknownStateError("state index " + std::to_string(from) + " out of range");
    if (to < 0 || to >= sys_.num_states())
        throw UnknownStateError("state index " + std::to_string(to) + " out of range");
    if (input < 0 || input >= sys_.num_inputs())
        throw UnknownInputError("input index " + std::to_string(input) + " out of range");
    auto& row = sys_.arcs_[from];
    auto it = std::lower_bound(row.begin(), row.end(), input,
                               [](const Arc& a, InputIndex v) { return a.input < v; });
    if (it != row.end() && it->input == input)
        throw DeterminismError("duplicate transition for (" + sys_.state_names_[from] + ", " +
                               sys_.input_names_[input] + ")");
    row.insert(it, Arc{input, to, cost});
    ++sys_.num_transitions_;
}

void SystemBuilder::add_transition(std::string_view from, std::string_view input,
                                   std::string_view to, double cost) {
    StateIndex f = state(from);
    InputIndex u = this->input(input);
    StateIndex t = state(to);
    add_transition(f, u, t, cost);
}

TransitionSystem SystemBuilder::build() {
    if (sys_.num_states() == 0) throw ParseError("system has no states");
    std::string dead;
    for (StateIndex x = 0; x < sys_.num_states(); ++x) {
        if (sys_.arcs_[x].empty()) {
            if (!dead.empty()) dead += ", ";
            dead += sys_.state_names_[x];
        }
    }
    if (!dead.empty()) throw DeadStateError("state(s) with no feasible input: " + dead);

    sys_.max_branching_ = 0;
    for (const auto& row : sys_.arcs_)
        sys_.max_branching_ = std::max(sys_.max_branching_, static_cast<int>(row.size()));

    auto uniform_dim = [](const std::vector<std::vector<double>>& coords) {
        std::size_t dim = coords.front().size();
        if (dim == 0) return false;
        for (const auto& c : coords)
            if (c.size() != dim) return false;
        return true;
    };
    sys_.full_coordinates_ =
        uniform_dim(sys_.state_coords_) && uniform_dim(sys_.input_coords_);
    return std::move(sys_);
}

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

double parse_number(std::string_view token, int line_no) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("expected a number, got '" + std::string(token) + "'", line_no);
    return value;
}

std::vector<double> parse_coords(std::span<const std::string_view> tokens, int line_no) {
    std::vector<double> coords;
    coords.reserve(tokens.size());
    for (auto t : tokens) coords.push_back(parse_number(t, line_no));
    return coords;
}

}  // namespace

TransitionSystem parse_system(std::string_view text) {
    SystemBuilder builder;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;

        std::string_view kind = tokens[0];
        if (kind == "state") {
            if (tokens.size() < 2) throw ParseError("state line needs a name", line_no);
            builder.declare_state(tokens[1],
                                  parse_coords({tokens.data() + 2, tokens.size() - 2}, line_no));
        } else if (kind == "input") {
            if (tokens.size() < 2) throw ParseError("input line needs a name", line_no);
            builder.declare_input(tokens[1],
                                  parse_coords({tokens.data() + 2, tokens.size() - 2}, line_no));
        } else if (kind == "trans") {
            if (tokens.size() != 5)
                throw ParseError("trans line needs <state> <input> <succ> <cost>", line_no);
            builder.add_transition(tokens[1], tokens[2], tokens[3],
                                   parse_number(tokens[4], line_no));
        } else {
            throw ParseError("unknown directive '" + std::string(kind) + "'", line_no);
        }
    }
    return builder.build();
}

TransitionSystem parse_system_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open system file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_system(buffer.str());
}

std::string serialize_system(const TransitionSystem& sys) {
    std::string out;
    auto emit_coords = [&out](std::span<const double> coords) {
        for (double c : coords) {
            out += ' ';
            out += format_double(c);
        }
    };
    for (StateIndex x = 0; x < sys.num_states(); ++x) {
        out += "state ";
        out += sys.state_name(x);
        emit_coords(sys.state_coord(x));
        out += '\n';
    }
    for (InputIndex u = 0; u < sys.num_inputs(); ++u) {
        out += "input ";
        out += sys.input_name(u);
        emit_coords(sys.input_coord(u));
        out += '\n';
    }
    for (StateIndex x = 0; x < sys.num_states(); ++x) {
        for (const Arc& arc : sys.arcs(x)) {
            out += "trans ";
            out += sys.state_name(x);
            out += ' ';
            out += sys.input_name(arc.input);
            out += ' ';
            out += sys.state_name(arc.next);
            out += ' ';
            out += format_double(arc.cost);
            out += '\n';
        }
    }
    return out;
}

std::vector<InputIndex> feasible_inputs(const TransitionSystem& sys, StateIndex x) {
    std::vector<InputIndex> inputs;
    auto row = sys.arcs(x);
    inputs.reserve(row.size());
    for (const Arc& arc : row) inputs.push_back(arc.input);
    return inputs;
}

Trajectory simulate(const TransitionSystem& sys, StateIndex x0,
                    std::span<const InputIndex> inputs) {
    if (x0 < 0 || x0 >= sys.num_states())
        throw UnknownStateError("state index " + std::to_string(x0) + " out of range");
    Trajectory traj;
    traj.initial = x0;
    traj.inputs.assign(inputs.begin(), inputs.end());
    traj.states.reserve(inputs.size() + 1);
    traj.states.push_back(x0);
    StateIndex cur = x0;
    for (std::size_t k = 0; k < inputs.size(); ++k) {
        const Arc* arc = sys.find_arc(cur, inputs[k]);
        if (!arc) {
            std::string name = (inputs[k] >= 0 && inputs[k] < sys.num_inputs())
                                   ? sys.input_name(inputs[k])
                                   : std::to_string(inputs[k]);
            throw InfeasibleInputError(
                "input '" + name + "' infeasible at state '" + sys.state_name(cur) + "'",
                static_cast<int>(k));
        }
        cur = arc->next;
        traj.states.push_back(cur);
    }
    return traj;
}

double total_cost(const TransitionSystem& sys, const Trajectory& traj, double shift) {
    double sum = 0.0;
    for (int k = 0; k < traj.length(); ++k) {
        const Arc* arc = sys.find_arc(traj.states[k], traj.inputs[k]);
        if (!arc) throw InfeasibleInputError("trajectory does not match the system", k);
        sum += arc->cost - shift;
    }
    return sum;
}

TransitionSystem with_cost_offset(const TransitionSystem& sys, double delta) {
    SystemBuilder builder;
    for (StateIndex x = 0; x < sys.num_states(); ++x) {
        auto coords = sys.state_coord(x);
        builder.declare_state(sys.state_name(x), {coords.begin(), coords.end()});
    }
    for (InputIndex u = 0; u < sys.num_inputs(); ++u) {
        auto coords = sys.input_coord(u);
        builder.declare_input(sys.input_name(u), {coords.begin(), coords.end()});
    }
    for (StateIndex x = 0; x < sys.num_states(); ++x)
        for (const Arc& arc : sys.arcs(x))
            builder.add_transition(x, arc.input, arc.next, arc.cost + delta);
    return builder.build();
}

}  // namespace cesaro
