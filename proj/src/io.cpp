#include "cbflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cbflow {

namespace {

CapModel::Family family_from_name(const std::string& name) {
    if (name == "none") return CapModel::Family::None;
    if (name == "sphere") return CapModel::Family::Sphere;
    if (name == "cigar") return CapModel::Family::Cigar;
    if (name == "linear") return CapModel::Family::Linear;
    throw std::runtime_error("unknown cap family: " + name);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open for reading: " + path);
    return is;
}

}  // namespace

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    // shortest precision that round-trips
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

void write_profile(std::ostream& os, const RadialProfile& p) {
    os << "# cap " << p.cap.family_name();
    if (p.cap.present())
        os << ' ' << fmt(p.cap.attach_s) << ' ' << fmt(p.cap.a) << ' ' << fmt(p.cap.c);
    os << "\n# n " << p.s.size() << '\n';
    for (std::size_t i = 0; i < p.s.size(); ++i)
        os << fmt(p.s[i]) << ' ' << fmt(p.u[i]) << '\n';
}

RadialProfile read_profile(std::istream& is) {
    RadialProfile p;
    std::size_t n = 0;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key;
            ls >> key;
            if (key == "cap") {
                std::string fam;
                ls >> fam;
                p.cap.family = family_from_name(fam);
                if (p.cap.present()) ls >> p.cap.attach_s >> p.cap.a >> p.cap.c;
            } else if (key == "n") {
                ls >> n;
            }
            continue;
        }
        std::istringstream ls(line);
        double s, u;
        if (!(ls >> s >> u)) throw std::runtime_error("malformed profile line: " + line);
        p.s.push_back(s);
        p.u.push_back(u);
        if (n > 0 && p.s.size() == n) break;
    }
    p.validate();
    return p;
}

void save_profile(const std::string& path, const RadialProfile& p) {
    auto os = open_out(path);
    write_profile(os, p);
}

RadialProfile load_profile(const std::string& path) {
    auto is = open_in(path);
    return read_profile(is);
}

void write_checkpoint(std::ostream& os, const Checkpoint& ck) {
    if (ck.has_params) {
        os << "== params\n";
        const CBParams& p = ck.params;
        os << "rc " << fmt(p.rc) << "\nlc " << fmt(p.lc) << "\ns0 " << fmt(p.s0) << "\nse "
           << fmt(p.se) << "\ns2 " << fmt(p.s2) << "\nsb " << fmt(p.sb) << '\n';
    }
    for (std::size_t i = 0; i < ck.times.size(); ++i) {
        os << "== t " << fmt(ck.times[i]) << '\n';
        write_profile(os, ck.profiles[i]);
    }
}

Checkpoint read_checkpoint(std::istream& is) {
    Checkpoint ck;
    std::string line;
    std::string pending;  // body lines of the current record
    bool in_params = false;
    double cur_t = 0.0;
    bool have_record = false;

    auto flush = [&]() {
        if (in_params) {
            std::istringstream ps(pending);
            std::string key;
            double val;
            while (ps >> key >> val) {
                if (key == "rc") ck.params.rc = val;
                else if (key == "lc") ck.params.lc = val;
                else if (key == "s0") ck.params.s0 = val;
                else if (key == "se") ck.params.se = val;
                else if (key == "s2") ck.params.s2 = val;
                else if (key == "sb") ck.params.sb = val;
                else throw std::runtime_error("unknown params key: " + key);
            }
            ck.has_params = true;
        } else if (have_record) {
            std::istringstream ps(pending);
            ck.times.push_back(cur_t);
            ck.profiles.push_back(read_profile(ps));
        }
        pending.clear();
    };

    while (std::getline(is, line)) {
        if (line.rfind("== ", 0) == 0) {
            flush();
            std::istringstream ls(line.substr(3));
            std::string kind;
            ls >> kind;
            if (kind == "params") {
                in_params = true;
                have_record = false;
            } else if (kind == "t") {
                in_params = false;
                have_record = true;
                if (!(ls >> cur_t)) throw std::runtime_error("malformed record header: " + line);
            } else {
                throw std::runtime_error("unknown record kind: " + kind);
            }
        } else {
            pending += line;
            pending += '\n';
        }
    }
    flush();
    if (ck.times.empty()) throw std::runtime_error("checkpoint holds no profile records");
    return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& ck) {
    auto os = open_out(path);
    write_checkpoint(os, ck);
}

Checkpoint load_checkpoint(const std::string& path) {
    auto is = open_in(path);
    return read_checkpoint(is);
}

Checkpoint to_checkpoint(const FlowSeries& fs) {
    Checkpoint ck;
    ck.times = fs.times;
    ck.profiles = fs.profiles;
    return ck;
}

void write_diagnostics_csv(std::ostream& os, const FlowSeries& fs) {
    os << "t,supK,infK,vol_total,vol_bulb,width,noose_rho,noose_len,noose_area\n";
    auto cell = [](double x) { return std::isnan(x) ? std::string() : fmt(x); };
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const FrameDiag& d = fs.diags[i];
        os << fmt(fs.times[i]) << ',' << fmt(d.sup_K) << ',' << fmt(d.inf_K) << ','
           << fmt(d.vol_total) << ',' << fmt(d.vol_bulb) << ',' << fmt(d.width) << ','
           << cell(d.noose_rho) << ',' << cell(d.noose_len) << ',' << cell(d.noose_area)
           << '\n';
    }
}

void save_diagnostics_csv(const std::string& path, const FlowSeries& fs) {
    auto os = open_out(path);
    write_diagnostics_csv(os, fs);
}

nlohmann::json params_to_json(const CBParams& p) {
    return {{"rc", p.rc}, {"lc", p.lc}, {"s0", p.s0},
            {"se", p.se}, {"s2", p.s2}, {"sb", p.sb}};
}

CBParams params_from_json(const nlohmann::json& j) {
    CBParams p;
    p.rc = j.at("rc");
    p.lc = j.at("lc");
    p.s0 = j.at("s0");
    p.se = j.at("se");
    p.s2 = j.at("s2");
    p.sb = j.at("sb");
    return p;
}

void save_json(const std::string& path, const nlohmann::json& j) {
    auto os = open_out(path);
    os << j.dump(2) << '\n';  // nlohmann objects iterate in sorted key order
}

nlohmann::json load_json(const std::string& path) {
    auto is = open_in(path);
    return nlohmann::json::parse(is);
}

}  // namespace cbflow
