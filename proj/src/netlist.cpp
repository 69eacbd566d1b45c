#include "sramlab/netlist.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace sramlab {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

struct Card {
    std::size_t line = 0;
    std::vector<std::string> tokens;
};

// Joins '+' continuations, drops comments and blank lines, lower-cases and
// splits on whitespace. Parentheses are dropped and '=' becomes its own token.
std::vector<Card> tokenize(std::string_view text) {
    std::vector<Card> cards;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string line(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '*') continue;

        bool continuation = line[first] == '+';
        if (continuation) line[first] = ' ';

        std::string spaced;
        for (char c : line) {
            if (c == '(' || c == ')' || c == ',') {
                spaced += ' ';
            } else if (c == '=') {
                spaced += " = ";
            } else {
                spaced += c;
            }
        }
        std::istringstream in(spaced);
        std::vector<std::string> tokens;
        for (std::string tok; in >> tok;) tokens.push_back(lower(tok));
        if (tokens.empty()) continue;

        if (continuation) {
            if (cards.empty()) throw ParseError(line_no, "+", "continuation without a card");
            auto& prev = cards.back().tokens;
            prev.insert(prev.end(), tokens.begin(), tokens.end());
        } else {
            cards.push_back({line_no, std::move(tokens)});
        }
        if (end == text.size()) break;
    }
    return cards;
}

struct KeyValues {
    std::vector<std::string> positional;
    std::vector<std::pair<std::string, std::string>> pairs;
};

KeyValues split_key_values(const Card& card) {
    KeyValues kv;
    const auto& t = card.tokens;
    std::size_t i = 0;
    while (i < t.size() && !(i + 1 < t.size() && t[i + 1] == "=")) {
        if (t[i] == "=") throw ParseError(card.line, t[i], "unexpected '='");
        kv.positional.push_back(t[i++]);
    }
    while (i < t.size()) {
        if (i + 2 >= t.size() || t[i + 1] != "=" || t[i] == "=" || t[i + 2] == "=") {
            throw ParseError(card.line, t[i], "expected key=value");
        }
        kv.pairs.emplace_back(t[i], t[i + 2]);
        i += 3;
    }
    return kv;
}

double number_at(const Card& card, const std::string& token) {
    try {
        return parse_number(token);
    } catch (const std::invalid_argument&) {
        throw ParseError(card.line, token, "malformed number");
    }
}

void parse_model(const Card& card, Circuit& circuit) {
    const KeyValues kv = split_key_values(card);
    if (kv.positional.size() != 3) {
        throw ParseError(card.line, card.tokens.front(), "expected .model <name> <NMOS|PMOS>");
    }
    const std::string& name = kv.positional[1];
    const std::string& type = kv.positional[2];
    DeviceParams p;
    if (type == "nmos") {
        p = default_nmos();
    } else if (type == "pmos") {
        p = default_pmos();
    } else {
        throw ParseError(card.line, type, "unknown model type");
    }
    for (const auto& [key, value] : kv.pairs) {
        const double v = number_at(card, value);
        if (key == "vto") p.vto = v;
        else if (key == "kp") p.kp = v;
        else if (key == "lambda") p.lambda = v;
        else if (key == "n") p.n_sub = v;
        else if (key == "i0") p.i0 = v;
        else if (key == "gamma") p.gamma = v;
        else if (key == "phi") p.phi = v;
        else if (key == "tcv") p.tcv = v;
        else throw ParseError(card.line, key, "unknown model parameter");
    }
    try {
        p.validate();
    } catch (const CircuitError& e) {
        throw ParseError(card.line, name, e.what());
    }
    if (!circuit.models.emplace(name, p).second) {
        throw ParseError(card.line, name, "duplicate model");
    }
}

void parse_mosfet(const Card& card, Circuit& circuit) {
    const KeyValues kv = split_key_values(card);
    if (kv.positional.size() != 6) {
        throw ParseError(card.line, card.tokens.front(),
                         "expected M<name> <d> <g> <s> <b> <model> W=<num> L=<num>");
    }
    MosfetInstance m;
    m.name = kv.positional[0];
    m.drain = kv.positional[1];
    m.gate = kv.positional[2];
    m.source = kv.positional[3];
    m.bulk = kv.positional[4];
    m.model = kv.positional[5];
    bool has_w = false;
    bool has_l = false;
    for (const auto& [key, value] : kv.pairs) {
        if (key == "w") {
            m.w = number_at(card, value);
            has_w = true;
        } else if (key == "l") {
            m.l = number_at(card, value);
            has_l = true;
        } else {
            throw ParseError(card.line, key, "unknown MOSFET parameter");
        }
    }
    if (!has_w || !has_l) throw ParseError(card.line, m.name, "W and L are required");
    if (m.w <= 0.0 || m.l <= 0.0) throw ParseError(card.line, m.name, "W and L must be positive");
    circuit.mosfets.push_back(std::move(m));
}

}  // namespace

double parse_number(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("empty number");
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (*begin == '+') ++begin;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) {
        throw std::invalid_argument("malformed number: " + std::string(text));
    }
    const std::string suffix = lower(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
    static const std::array<std::pair<const char*, double>, 7> kScales{{
        {"", 1.0}, {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9},
        {"u", 1e-6}, {"m", 1e-3}, {"k", 1e3},
    }};
    if (suffix == "meg") return value * 1e6;
    for (const auto& [s, scale] : kScales) {
        if (suffix == s) return scale == 1.0 ? value : value * scale;
    }
    throw std::invalid_argument("unknown scale suffix: " + std::string(text));
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::scientific);
    (void)ec;
    return std::string(buf.data(), ptr);
}

std::set<std::string> Circuit::nets() const {
    std::set<std::string> out{kGround};
    for (const auto& m : mosfets) out.insert({m.drain, m.gate, m.source, m.bulk});
    for (const auto& v : vsources) out.insert({v.pos, v.neg});
    for (const auto& r : resistors) out.insert({r.pos, r.neg});
    return out;
}

bool Circuit::has_net(std::string_view net) const {
    const auto all = nets();
    return all.find(std::string(net)) != all.end();
}

const VoltageSource* Circuit::find_source(std::string_view name) const {
    for (const auto& v : vsources) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

VoltageSource* Circuit::find_source(std::string_view name) {
    for (auto& v : vsources) {
        if (v.name == name) return &v;
    }
    return nullptr;
}

const MosfetInstance* Circuit::find_mosfet(std::string_view name) const {
    for (const auto& m : mosfets) {
        if (m.name == name) return &m;
    }
    return nullptr;
}

void Circuit::validate() const {
    std::set<std::string> names;
    auto claim = [&](const std::string& name) {
        if (name.empty()) throw CircuitError("instance with empty name");
        if (!names.insert(name).second) throw CircuitError("duplicate instance name: " + name);
    };
    for (const auto& m : mosfets) {
        claim(m.name);
        if (!(m.w > 0.0) || !(m.l > 0.0)) throw CircuitError("non-positive W or L on " + m.name);
        const auto it = models.find(m.model);
        if (it == models.end()) throw CircuitError("unknown model '" + m.model + "' on " + m.name);
    }
    for (const auto& v : vsources) claim(v.name);
    for (const auto& r : resistors) {
        claim(r.name);
        if (!(r.ohms > 0.0)) throw CircuitError("non-positive resistance on " + r.name);
    }
    for (const auto& [name, p] : models) p.validate();
}

bool equivalent(const Circuit& a, const Circuit& b) {
    auto sorted = [](auto v) {
        std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.name < y.name; });
        return v;
    };
    return sorted(a.mosfets) == sorted(b.mosfets) && sorted(a.vsources) == sorted(b.vsources) &&
           sorted(a.resistors) == sorted(b.resistors) && a.models == b.models;
}

Circuit parse_netlist(std::string_view text) {
    Circuit circuit;
    std::map<std::string, std::size_t> mosfet_lines;
    std::set<std::string> names;

    for (const Card& card : tokenize(text)) {
        const std::string& head = card.tokens.front();
        if (head == ".end") break;
        if (head == ".model") {
            parse_model(card, circuit);
            continue;
        }
        if (head.front() == '.') throw ParseError(card.line, head, "unsupported control card");

        if (!names.insert(head).second) {
            throw ParseError(card.line, head, "duplicate instance name");
        }
        switch (head.front()) {
            case 'm':
                parse_mosfet(card, circuit);
                mosfet_lines[head] = card.line;
                break;
            case 'v':
            case 'r': {
                if (card.tokens.size() != 4) {
                    throw ParseError(card.line, head, "expected <name> <n+> <n-> <value>");
                }
                const double value = number_at(card, card.tokens[3]);
                if (head.front() == 'v') {
                    circuit.vsources.push_back({head, card.tokens[1], card.tokens[2], value});
                } else {
                    if (value <= 0.0) throw ParseError(card.line, head, "resistance must be positive");
                    circuit.resistors.push_back({head, card.tokens[1], card.tokens[2], value});
                }
                break;
            }
            default:
                throw ParseError(card.line, head, "unsupported element");
        }
    }

    for (const auto& m : circuit.mosfets) {
        if (circuit.models.find(m.model) == circuit.models.end()) {
            throw ParseError(mosfet_lines[m.name], m.model, "unknown model reference");
        }
    }
    return circuit;
}

std::string serialize_netlist(const Circuit& circuit) {
    std::ostringstream out;
    for (const auto& [name, p] : circuit.models) {
        out << ".model " << name << ' ' << (p.polarity == Polarity::NMOS ? "NMOS" : "PMOS")
            << " (VTO=" << format_number(p.vto) << " KP=" << format_number(p.kp)
            << " LAMBDA=" << format_number(p.lambda) << " N=" << format_number(p.n_sub)
            << " I0=" << format_number(p.i0) << " GAMMA=" << format_number(p.gamma)
            << " PHI=" << format_number(p.phi) << " TCV=" << format_number(p.tcv) << ")\n";
    }
    for (const auto& m : circuit.mosfets) {
        out << upper(m.name) << ' ' << m.drain << ' ' << m.gate << ' ' << m.source << ' ' << m.bulk
            << ' ' << m.model << " W=" << format_number(m.w) << " L=" << format_number(m.l) << '\n';
    }
    for (const auto& v : circuit.vsources) {
        out << upper(v.name) << ' ' << v.pos << ' ' << v.neg << ' ' << format_number(v.volts) << '\n';
    }
    for (const auto& r : circuit.resistors) {
        out << upper(r.name) << ' ' << r.pos << ' ' << r.neg << ' ' << format_number(r.ohms) << '\n';
    }
    out << ".end\n";
    return out.str();
}

}  // namespace sramlab
