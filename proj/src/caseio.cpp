#include "flex/caseio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

namespace flex {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// --- MATPOWER-style case text ------------------------------------------------

struct MTable {
    std::vector<std::vector<double>> rows;
    std::vector<int> row_lines;
};

struct MCase {
    double base_mva = 0.0;
    bool has_base = false;
    MTable bus, branch, gen;
};

double parse_number(const std::string& tok, int line) {
    try {
        size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError("malformed number '" + tok + "'", line);
    }
}

MCase scan_case(const std::string& text) {
    MCase mc;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    MTable* table = nullptr;
    while (std::getline(in, raw)) {
        ++line_no;
        const size_t cmt = raw.find('%');
        if (cmt != std::string::npos) raw.erase(cmt);
        std::string line = trim(raw);
        if (line.empty()) continue;

        if (!table) {
            if (line.rfind("mpc.baseMVA", 0) == 0) {
                const size_t eq = line.find('=');
                if (eq == std::string::npos) throw ParseError("expected '=' after baseMVA", line_no);
                std::string v = trim(line.substr(eq + 1));
                if (!v.empty() && v.back() == ';') v.pop_back();
                mc.base_mva = parse_number(trim(v), line_no);
                mc.has_base = true;
                continue;
            }
            // A table opens with "mpc.<name> = [" (avoid matching mpc.gencost etc).
            auto opens_table = [&line](const char* key) {
                if (line.rfind(key, 0) != 0) return false;
                size_t p = std::string(key).size();
                while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
                return p < line.size() && line[p] == '=' && line.find('[') != std::string::npos;
            };
            for (auto [key, tbl] : {std::pair<const char*, MTable*>{"mpc.bus", &mc.bus},
                                    {"mpc.gen", &mc.gen},
                                    {"mpc.branch", &mc.branch}}) {
                if (opens_table(key)) {
                    table = tbl;
                    line = trim(line.substr(line.find('[') + 1));
                    break;
                }
            }
            if (!table || line.empty()) continue;
        }

        // Inside a table: rows end with ';', the table with '];'.
        bool closes = false;
        const size_t close = line.find(']');
        if (close != std::string::npos) {
            closes = true;
            line = trim(line.substr(0, close));
        }
        if (!line.empty()) {
            std::vector<double> row;
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) {
                while (!tok.empty() && (tok.back() == ';' || tok.back() == ',')) tok.pop_back();
                if (tok.empty()) continue;
                row.push_back(parse_number(tok, line_no));
            }
            if (!row.empty()) {
                table->rows.push_back(std::move(row));
                table->row_lines.push_back(line_no);
            }
        }
        if (closes) table = nullptr;
    }
    return mc;
}

}  // namespace

Scenario parse_case_m(const std::string& text, const CaseOptions& opts) {
    const MCase mc = scan_case(text);
    if (!mc.has_base) throw ParseError("missing mpc.baseMVA");
    if (mc.base_mva <= 0.0) throw ParseError("baseMVA must be positive");
    if (mc.bus.rows.empty()) throw ParseError("missing or empty mpc.bus table");
    if (mc.branch.rows.empty()) throw ParseError("missing or empty mpc.branch table");

    Scenario sc;
    sc.network.base_mva = mc.base_mva;
    sc.network.units = Units::Physical;

    int slack_count = 0;
    for (size_t r = 0; r < mc.bus.rows.size(); ++r) {
        const auto& row = mc.bus.rows[r];
        const int line = mc.bus.row_lines[r];
        if (row.size() < 13) throw ParseError("bus row needs 13 columns", line);
        Bus b;
        b.id = static_cast<int>(row[0]);
        const int type = static_cast<int>(row[1]);
        if (type == 3) {
            b.kind = BusKind::Slack;
            if (++slack_count > 1) throw ParseError("multiple slack buses", line);
            sc.network.slack_id = b.id;
        } else {
            b.kind = BusKind::Pq;
        }
        b.p_load = row[2];
        b.q_load = row[3];
        b.v_max = row[11];
        b.v_min = row[12];
        for (const Bus& seen : sc.network.buses)
            if (seen.id == b.id) throw ParseError("duplicate bus id " + std::to_string(b.id), line);
        sc.network.buses.push_back(b);
    }
    if (slack_count == 0) throw ParseError("missing slack bus (type 3)");

    for (size_t r = 0; r < mc.branch.rows.size(); ++r) {
        const auto& row = mc.branch.rows[r];
        const int line = mc.branch.row_lines[r];
        if (row.size() < 11) throw ParseError("branch row needs at least 11 columns", line);
        if (row[10] == 0.0) continue;  // out of service
        Line l;
        l.from = static_cast<int>(row[0]);
        l.to = static_cast<int>(row[1]);
        l.r = row[2];
        l.x = row[3];
        l.s_max = row[5] > 0.0 ? row[5] : opts.unlimited_rating_pu * mc.base_mva;
        sc.network.lines.push_back(l);
    }

    for (size_t r = 0; r < mc.gen.rows.size(); ++r) {
        const auto& row = mc.gen.rows[r];
        const int line = mc.gen.row_lines[r];
        if (row.size() < 10) throw ParseError("gen row needs at least 10 columns", line);
        if (row[7] == 0.0) continue;  // status
        const int bus = static_cast<int>(row[0]);
        if (bus == sc.network.slack_id) continue;  // the grid connection itself
        FpuSpec f;
        f.id = "gen" + std::to_string(bus) + "_" + std::to_string(r + 1);
        f.bus = bus;
        f.kind = FpuKind::Type1;
        f.params.q_max = row[3];
        f.params.q_min = row[4];
        f.params.p_max = row[8];
        f.params.p_min = row[9];
        sc.fpus.push_back(f);
    }

    sc.validate();
    return sc;
}

// --- Native structured document ----------------------------------------------

namespace {

[[noreturn]] void fail_at(const std::string& path, const std::string& msg) {
    throw ParseError(path + ": " + msg);
}

const ordered_json& need(const ordered_json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail_at(path + "/" + key, "missing required key");
    return *it;
}

double need_num(const ordered_json& obj, const char* key, const std::string& path) {
    const ordered_json& v = need(obj, key, path);
    if (!v.is_number()) fail_at(path + "/" + key, "expected a number");
    return v.get<double>();
}

double opt_num(const ordered_json& obj, const char* key, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return it->get<double>();
}

FpuKind kind_from_string(const std::string& s, const std::string& path) {
    if (s == "type1") return FpuKind::Type1;
    if (s == "type2") return FpuKind::Type2;
    if (s == "type3") return FpuKind::Type3;
    if (s == "type4") return FpuKind::Type4;
    if (s == "type5") return FpuKind::Type5;
    fail_at(path, "unknown fpu kind '" + s + "'");
}

}  // namespace

Scenario parse_native(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("/: expected an object");

    Scenario sc;
    sc.name = doc.value("name", "");

    const ordered_json& net = need(doc, "network", "");
    sc.network.base_mva = need_num(net, "base_mva", "/network");
    sc.network.slack_id = static_cast<int>(need_num(net, "slack_id", "/network"));
    sc.network.slack_vm = opt_num(net, "slack_vm", 1.0);
    const std::string units = net.value("units", "MW");
    if (units == "MW")
        sc.network.units = Units::Physical;
    else if (units == "pu")
        sc.network.units = Units::PerUnit;
    else
        fail_at("/network/units", "expected 'MW' or 'pu'");

    const ordered_json& buses = need(net, "buses", "/network");
    if (!buses.is_array() || buses.empty()) fail_at("/network/buses", "expected a non-empty array");
    for (size_t i = 0; i < buses.size(); ++i) {
        const std::string path = "/network/buses/" + std::to_string(i);
        const ordered_json& jb = buses[i];
        Bus b;
        b.id = static_cast<int>(need_num(jb, "id", path));
        const std::string kind = jb.value("kind", "pq");
        if (kind == "slack")
            b.kind = BusKind::Slack;
        else if (kind == "pq")
            b.kind = BusKind::Pq;
        else
            fail_at(path + "/kind", "expected 'slack' or 'pq'");
        b.v_min = opt_num(jb, "v_min", 0.9);
        b.v_max = opt_num(jb, "v_max", 1.1);
        b.p_load = opt_num(jb, "p_load", 0.0);
        b.q_load = opt_num(jb, "q_load", 0.0);
        sc.network.buses.push_back(b);
    }

    const ordered_json& lines = need(net, "lines", "/network");
    if (!lines.is_array()) fail_at("/network/lines", "expected an array");
    for (size_t i = 0; i < lines.size(); ++i) {
        const std::string path = "/network/lines/" + std::to_string(i);
        const ordered_json& jl = lines[i];
        Line l;
        l.from = static_cast<int>(need_num(jl, "from", path));
        l.to = static_cast<int>(need_num(jl, "to", path));
        l.r = need_num(jl, "r", path);
        l.x = need_num(jl, "x", path);
        l.s_max = need_num(jl, "s_max", path);
        sc.network.lines.push_back(l);
    }

    if (doc.contains("fpus")) {
        const ordered_json& fpus = doc["fpus"];
        if (!fpus.is_array()) fail_at("/fpus", "expected an array");
        for (size_t i = 0; i < fpus.size(); ++i) {
            const std::string path = "/fpus/" + std::to_string(i);
            const ordered_json& jf = fpus[i];
            FpuSpec f;
            const ordered_json& jid = need(jf, "id", path);
            if (!jid.is_string()) fail_at(path + "/id", "expected a string");
            f.id = jid.get<std::string>();
            f.bus = static_cast<int>(need_num(jf, "bus", path));
            const ordered_json& jkind = need(jf, "kind", path);
            if (!jkind.is_string()) fail_at(path + "/kind", "expected a string");
            f.kind = kind_from_string(jkind.get<std::string>(), path + "/kind");
            const ordered_json& jp = need(jf, "params", path);
            if (!jp.is_object()) fail_at(path + "/params", "expected an object");
            f.params.p_min = opt_num(jp, "p_min", 0.0);
            f.params.p_max = opt_num(jp, "p_max", 0.0);
            f.params.q_min = opt_num(jp, "q_min", 0.0);
            f.params.q_max = opt_num(jp, "q_max", 0.0);
            f.params.s_rated = opt_num(jp, "s_rated", 0.0);
            f.params.cos_phi = opt_num(jp, "cos_phi", 1.0);
            f.params.q_share = opt_num(jp, "q_share", 0.0);
            f.params.weather_dependent = jp.value("weather_dependent", false);
            sc.fpus.push_back(f);
        }
    }

    try {
        sc.validate();
    } catch (const std::exception& e) {
        throw ParseError(std::string("scenario invalid: ") + e.what());
    }
    return sc;
}

std::string serialize_native(const Scenario& sc) {
    ordered_json doc;
    doc["name"] = sc.name;
    ordered_json net;
    net["base_mva"] = sc.network.base_mva;
    net["slack_id"] = sc.network.slack_id;
    net["slack_vm"] = sc.network.slack_vm;
    net["units"] = sc.network.units == Units::Physical ? "MW" : "pu";
    net["buses"] = ordered_json::array();
    for (const Bus& b : sc.network.buses) {
        ordered_json jb;
        jb["id"] = b.id;
        jb["kind"] = b.kind == BusKind::Slack ? "slack" : "pq";
        jb["v_min"] = b.v_min;
        jb["v_max"] = b.v_max;
        jb["p_load"] = b.p_load;
        jb["q_load"] = b.q_load;
        net["buses"].push_back(jb);
    }
    net["lines"] = ordered_json::array();
    for (const Line& l : sc.network.lines) {
        ordered_json jl;
        jl["from"] = l.from;
        jl["to"] = l.to;
        jl["r"] = l.r;
        jl["x"] = l.x;
        jl["s_max"] = l.s_max;
        net["lines"].push_back(jl);
    }
    doc["network"] = net;
    doc["fpus"] = ordered_json::array();
    for (const FpuSpec& f : sc.fpus) {
        ordered_json jf;
        jf["id"] = f.id;
        jf["bus"] = f.bus;
        jf["kind"] = to_string(f.kind);
        ordered_json jp;
        switch (f.kind) {
            case FpuKind::Type1:
                jp["p_min"] = f.params.p_min;
                jp["p_max"] = f.params.p_max;
                jp["q_min"] = f.params.q_min;
                jp["q_max"] = f.params.q_max;
                break;
            case FpuKind::Type2:
                jp["p_min"] = f.params.p_min;
                jp["p_max"] = f.params.p_max;
                jp["cos_phi"] = f.params.cos_phi;
                break;
            case FpuKind::Type3:
                jp["p_max"] = f.params.p_max;
                jp["s_rated"] = f.params.s_rated;
                jp["q_share"] = f.params.q_share;
                break;
            case FpuKind::Type4:
                jp["p_max"] = f.params.p_max;
                jp["s_rated"] = f.params.s_rated;
                break;
            case FpuKind::Type5:
                jp["p_min"] = f.params.p_min;
                jp["p_max"] = f.params.p_max;
                jp["q_min"] = f.params.q_min;
                jp["s_rated"] = f.params.s_rated;
                if (f.params.weather_dependent) jp["weather_dependent"] = true;
                break;
        }
        jf["params"] = jp;
        doc["fpus"].push_back(jf);
    }
    return doc.dump(2) + "\n";
}

// --- Delimited time series ----------------------------------------------------

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

}  // namespace

TimeSeriesProfile load_timeseries(const std::string& text, const Scenario& scenario,
                                  const TimeSeriesOptions& opts) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    int interval_minutes = opts.interval_minutes;

    std::vector<std::string> header;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string directive = trim(line.substr(1));
            if (directive.rfind("interval_minutes=", 0) == 0)
                interval_minutes = static_cast<int>(parse_number(directive.substr(17), line_no));
            continue;
        }
        header = split_csv(line);
        break;
    }
    if (header.empty()) throw ParseError("time series has no header row");
    if (interval_minutes <= 0) throw ParseError("interval_minutes must be positive");

    // Column -> target mapping.
    enum class Target { Availability, LoadScale };
    struct Column {
        Target target;
        size_t index;  // fpu index or bus index
    };
    std::vector<Column> columns;  // aligned with header[1..]
    for (size_t c = 1; c < header.size(); ++c) {
        const std::string& name = header[c];
        const size_t colon = name.rfind(':');
        if (colon == std::string::npos)
            throw ParseError("column '" + name + "' must be '<fpu>:availability' or '<bus>:load_scale'");
        const std::string ident = name.substr(0, colon);
        const std::string role = name.substr(colon + 1);
        if (role == "availability") {
            const FpuSpec* f = scenario.find_fpu(ident);
            if (!f) throw ParseError("column '" + name + "': unknown fpu '" + ident + "'");
            size_t idx = 0;
            while (&scenario.fpus[idx] != f) ++idx;
            columns.push_back({Target::Availability, idx});
        } else if (role == "load_scale") {
            int bus_id;
            try {
                bus_id = std::stoi(ident);
            } catch (const std::exception&) {
                throw ParseError("column '" + name + "': bus id must be an integer");
            }
            int idx;
            try {
                idx = scenario.network.index_of(bus_id);
            } catch (const InvalidNetwork&) {
                throw ParseError("column '" + name + "': unknown bus " + ident);
            }
            columns.push_back({Target::LoadScale, static_cast<size_t>(idx)});
        } else {
            throw ParseError("column '" + name + "': unknown role '" + role + "'");
        }
    }

    TimeSeriesProfile profile;
    profile.interval_minutes = interval_minutes;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != header.size())
            throw ParseError("ragged row: expected " + std::to_string(header.size()) +
                                 " cells, found " + std::to_string(cells.size()),
                             line_no);
        std::vector<double> avail(scenario.fpus.size(), 1.0);
        std::vector<double> scale(scenario.network.buses.size(), 1.0);
        for (size_t c = 1; c < cells.size(); ++c) {
            const double v = parse_number(cells[c], line_no);
            const Column& col = columns[c - 1];
            if (col.target == Target::Availability) {
                if (v < 0.0 || v > 1.0)
                    throw ParseError("availability " + cells[c] + " outside [0, 1]", line_no);
                avail[col.index] = v;
            } else {
                if (v < 0.0) throw ParseError("load scale must be non-negative", line_no);
                scale[col.index] = v;
            }
        }
        profile.availability.push_back(std::move(avail));
        profile.load_scale.push_back(std::move(scale));
    }
    profile.intervals = static_cast<int>(profile.availability.size());
    if (profile.intervals == 0) throw ParseError("time series has no data rows");
    if (profile.intervals * interval_minutes != opts.horizon_minutes)
        throw ParseError("interval count mismatch: " + std::to_string(profile.intervals) + " x " +
                         std::to_string(interval_minutes) + " min does not span " +
                         std::to_string(opts.horizon_minutes) + " min");
    return profile;
}

}  // namespace flex
