#include "risgame/scene.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace risgame {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using cplx = std::complex<double>;
using json = nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }
double amplitude_to_db(double a) { return 20.0 * std::log10(a); }

void SceneConfig::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("invalid scene: ") + what);
    };
    require(N_S >= 1, "N_S must be >= 1");
    require(N_D >= 1, "N_D must be >= 1");
    require(N_J >= 1, "N_J must be >= 1");
    require(N >= 0, "N must be >= 0");
    require(P_S_max > 0.0, "P_S_max must be > 0");
    require(P_J_max > 0.0, "P_J_max must be > 0");
    require(P_R_max > 0.0, "P_R_max must be > 0");
    require(lambda_max > 0.0, "lambda_max must be > 0");
    require(sigma_R2 > 0.0, "sigma_R2 must be > 0");
    require(sigma_D2 > 0.0, "sigma_D2 must be > 0");
    require(c_S > 0.0, "c_S must be > 0");
    require(c_J > 0.0, "c_J must be > 0");
    require(eta_ground > 0.0, "eta_ground must be > 0");
    require(eta_ris > 0.0, "eta_ris must be > 0");
    require(L0 > 0.0, "L0 must be > 0");
    require(rician_K >= 0.0, "rician_K must be >= 0");
    require(delta >= 0.0, "delta must be >= 0");
    require(pos_R.z >= 0.0, "surface height must be >= 0");
}

namespace {

Point2 read_point2(const json& j, const char* key)
{
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument(std::string(key) + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Point3 read_point3(const json& j, const char* key)
{
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument(std::string(key) + ": expected [x, y, height]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

SceneConfig scene_from_json(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("scene JSON: ") + e.what());
    }
    if (doc.contains("scene")) doc = doc["scene"];
    if (!doc.is_object()) throw std::invalid_argument("scene JSON: expected an object");

    SceneConfig c;
    static const std::set<std::string> known = {
        "pos_S", "pos_D", "pos_J", "pos_R", "N_S", "N_D", "N_J", "N", "P_S_max", "P_J_max",
        "P_R_max_dBm", "lambda_max_dB", "sigma_R2_dBW", "sigma_D2_dBW", "c_S", "c_J", "eta_ground",
        "eta_ris", "L0_dB", "rician_K", "delta", "seed", "experiment"};
    for (const auto& [k, v] : doc.items()) {
        if (!known.contains(k)) throw std::invalid_argument("scene JSON: unknown field '" + k + "'");
    }
    try {
        if (doc.contains("pos_S")) c.pos_S = read_point2(doc["pos_S"], "pos_S");
        if (doc.contains("pos_D")) c.pos_D = read_point2(doc["pos_D"], "pos_D");
        if (doc.contains("pos_J")) c.pos_J = read_point2(doc["pos_J"], "pos_J");
        if (doc.contains("pos_R")) c.pos_R = read_point3(doc["pos_R"], "pos_R");
        c.N_S = doc.value("N_S", c.N_S);
        c.N_D = doc.value("N_D", c.N_D);
        c.N_J = doc.value("N_J", c.N_J);
        c.N = doc.value("N", c.N);
        c.P_S_max = doc.value("P_S_max", c.P_S_max);
        c.P_J_max = doc.value("P_J_max", c.P_J_max);
        if (doc.contains("P_R_max_dBm")) c.P_R_max = dbm_to_watts(doc["P_R_max_dBm"].get<double>());
        if (doc.contains("lambda_max_dB")) c.lambda_max = db_to_amplitude(doc["lambda_max_dB"].get<double>());
        if (doc.contains("sigma_R2_dBW")) c.sigma_R2 = db_to_linear(doc["sigma_R2_dBW"].get<double>());
        if (doc.contains("sigma_D2_dBW")) c.sigma_D2 = db_to_linear(doc["sigma_D2_dBW"].get<double>());
        c.c_S = doc.value("c_S", c.c_S);
        c.c_J = doc.value("c_J", c.c_J);
        c.eta_ground = doc.value("eta_ground", c.eta_ground);
        c.eta_ris = doc.value("eta_ris", c.eta_ris);
        if (doc.contains("L0_dB")) c.L0 = db_to_linear(doc["L0_dB"].get<double>());
        if (doc.contains("rician_K")) {
            const auto& k = doc["rician_K"];
            if (k.is_string() && k.get<std::string>() == "inf") c.rician_K = std::numeric_limits<double>::infinity();
            else c.rician_K = k.get<double>();
        }
        c.delta = doc.value("delta", c.delta);
        c.seed = doc.value("seed", c.seed);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("scene JSON: ") + e.what());
    }
    c.validate();
    return c;
}

SceneConfig load_scene(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scene file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scene_from_json(ss.str());
}

std::string scene_to_json(const SceneConfig& c)
{
    json j;
    j["pos_S"] = {c.pos_S.x, c.pos_S.y};
    j["pos_D"] = {c.pos_D.x, c.pos_D.y};
    j["pos_J"] = {c.pos_J.x, c.pos_J.y};
    j["pos_R"] = {c.pos_R.x, c.pos_R.y, c.pos_R.z};
    j["N_S"] = c.N_S;
    j["N_D"] = c.N_D;
    j["N_J"] = c.N_J;
    j["N"] = c.N;
    j["P_S_max"] = c.P_S_max;
    j["P_J_max"] = c.P_J_max;
    j["P_R_max_dBm"] = watts_to_dbm(c.P_R_max);
    j["lambda_max_dB"] = amplitude_to_db(c.lambda_max);
    j["sigma_R2_dBW"] = linear_to_db(c.sigma_R2);
    j["sigma_D2_dBW"] = linear_to_db(c.sigma_D2);
    j["c_S"] = c.c_S;
    j["c_J"] = c.c_J;
    j["eta_ground"] = c.eta_ground;
    j["eta_ris"] = c.eta_ris;
    j["L0_dB"] = linear_to_db(c.L0);
    if (std::isinf(c.rician_K)) j["rician_K"] = "inf";
    else j["rician_K"] = c.rician_K;
    j["delta"] = c.delta;
    j["seed"] = c.seed;
    return j.dump(2);
}

double path_loss_gain(double d, double eta, double L0)
{
    if (!(d >= 1.0)) throw std::domain_error("path_loss_gain: distance below the 1 m reference");
    if (!(eta > 0.0) || !(L0 > 0.0)) throw std::domain_error("path_loss_gain: eta and L0 must be positive");
    return L0 * std::pow(d, -eta);
}

ChannelSet ChannelSet::perfect() const
{
    ChannelSet c = *this;
    c.Hhat_JD = H_JD;
    c.Hhat_JR = H_JR;
    c.eps_JD = 0.0;
    c.eps_JR = 0.0;
    return c;
}

ChannelSet ChannelSet::estimates_as_truth() const
{
    ChannelSet c = *this;
    c.H_JD = Hhat_JD;
    c.H_JR = Hhat_JR;
    c.eps_JD = 0.0;
    c.eps_JR = 0.0;
    return c;
}

ChannelSet ChannelSet::without_surface() const
{
    ChannelSet c = *this;
    const auto ns = H_SD.cols(), nd = H_SD.rows(), nj = H_JD.cols();
    c.H_SR.resize(0, ns);
    c.H_RD.resize(nd, 0);
    c.H_JR.resize(0, nj);
    c.Hhat_JR.resize(0, nj);
    c.eps_JR = 0.0;
    return c;
}

namespace {

MatrixXcd gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    MatrixXcd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = g(rng);
            const double im = g(rng);
            m(i, j) = cplx(re, im);
        }
    }
    return m;
}

double distance(const Point3& a, const Point3& b)
{
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

Point3 ground(const Point2& p) { return {p.x, p.y, 0.0}; }

MatrixXcd rayleigh(int rx, int tx, const Point3& from, const Point3& to, const SceneConfig& cfg, Rng& rng)
{
    const double pl = path_loss_gain(distance(from, to), cfg.eta_ground, cfg.L0);
    return std::sqrt(pl) * gaussian(rx, tx, rng);
}

// Arrays lie along the x axis; the direction cosine is taken along it.
MatrixXcd rician(int rx, int tx, const Point3& from, const Point3& to, const SceneConfig& cfg, Rng& rng)
{
    const double d = distance(from, to);
    const double pl = path_loss_gain(d, cfg.eta_ris, cfg.L0);
    const double u = (to.x - from.x) / d;
    MatrixXcd los = ula_steering(rx, -u) * ula_steering(tx, u).adjoint();
    MatrixXcd nlos = gaussian(rx, tx, rng);
    double w_los = 1.0, w_nlos = 0.0;
    if (!std::isinf(cfg.rician_K)) {
        w_los = std::sqrt(cfg.rician_K / (cfg.rician_K + 1.0));
        w_nlos = std::sqrt(1.0 / (cfg.rician_K + 1.0));
    }
    return std::sqrt(pl) * (w_los * los + w_nlos * nlos);
}

}  // namespace

VectorXcd ula_steering(int m, double u)
{
    VectorXcd a(m);
    for (int k = 0; k < m; ++k) a(k) = std::polar(1.0, std::numbers::pi * k * u);
    return a;
}

UncertainEstimate make_uncertainty(const MatrixXcd& truth, double delta, Rng& rng)
{
    if (delta < 0.0) throw std::invalid_argument("make_uncertainty: delta must be >= 0");
    UncertainEstimate out;
    const double r = delta * truth.norm();
    MatrixXcd dir = gaussian(truth.rows(), truth.cols(), rng);
    const double n = dir.norm();
    if (r == 0.0 || n == 0.0) {
        out.estimate = truth;
        out.radius = 0.0;
        return out;
    }
    out.estimate = truth - (r / n) * dir;
    out.radius = r * r;
    return out;
}

ChannelSet draw_channels(const SceneConfig& cfg, Rng& rng)
{
    cfg.validate();
    // Each link draws from its own stream so that enabling or resizing the
    // surface leaves the ground links and their estimates unchanged.
    const std::uint64_t base = rng();
    auto stream = [base](std::uint32_t link) {
        std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32), link};
        return Rng(seq);
    };
    const Point3 S = ground(cfg.pos_S), D = ground(cfg.pos_D), J = ground(cfg.pos_J), R = cfg.pos_R;
    ChannelSet ch;
    Rng r_sd = stream(1), r_jd = stream(2), r_sr = stream(3), r_rd = stream(4), r_jr = stream(5);
    Rng r_ejd = stream(6), r_ejr = stream(7);
    ch.H_SD = rayleigh(cfg.N_D, cfg.N_S, S, D, cfg, r_sd);
    ch.H_JD = rayleigh(cfg.N_D, cfg.N_J, J, D, cfg, r_jd);
    if (cfg.N > 0) {
        ch.H_SR = rician(cfg.N, cfg.N_S, S, R, cfg, r_sr);
        ch.H_RD = rician(cfg.N_D, cfg.N, R, D, cfg, r_rd);
        ch.H_JR = rician(cfg.N, cfg.N_J, J, R, cfg, r_jr);
    } else {
        ch.H_SR.resize(0, cfg.N_S);
        ch.H_RD.resize(cfg.N_D, 0);
        ch.H_JR.resize(0, cfg.N_J);
    }
    auto jd = make_uncertainty(ch.H_JD, cfg.delta, r_ejd);
    auto jr = make_uncertainty(ch.H_JR, cfg.delta, r_ejr);
    ch.Hhat_JD = std::move(jd.estimate);
    ch.eps_JD = jd.radius;
    ch.Hhat_JR = std::move(jr.estimate);
    ch.eps_JR = jr.radius;
    return ch;
}

}  // namespace risgame
