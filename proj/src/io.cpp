#include "spinsim/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinsim/errors.hpp"
#include "spinsim/experiments.hpp"
#include "spinsim/oracle.hpp"
#include "spinsim/stats.hpp"

namespace fs = std::filesystem;

namespace spinsim::io {

namespace {

std::string joinFlags(const std::vector<std::string>& flags) {
    std::string out;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += flags[i];
    }
    return out;
}

std::string formatMoment(const Vec3& m) {
    return formatDouble(m.x()) + "," + formatDouble(m.y()) + "," + formatDouble(m.z());
}

Vec3 parseMoment(const std::string& text) {
    if (text == "x") {
        return Vec3::UnitX();
    }
    if (text == "y") {
        return Vec3::UnitY();
    }
    if (text == "z") {
        return Vec3::UnitZ();
    }
    std::array<double, 3> v{};
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        const std::size_t comma = text.find(',', pos);
        const bool last = i == 2;
        if (last != (comma == std::string::npos)) {
            throw UsageError("--initial-moment expects x, y, z or ax,ay,az");
        }
        const std::string field = text.substr(pos, last ? std::string::npos : comma - pos);
        try {
            std::size_t used = 0;
            v[static_cast<std::size_t>(i)] = std::stod(field, &used);
            if (used != field.size()) {
                throw std::invalid_argument(field);
            }
        } catch (const std::exception&) {
            throw UsageError("--initial-moment component '" + field + "' is not a number");
        }
        pos = comma + 1;
    }
    Vec3 moment(v[0], v[1], v[2]);
    const double norm = moment.norm();
    if (std::abs(norm - 1.0) > 1e-9) {
        throw UsageError("--initial-moment must be a unit vector (norm deviates by more than 1e-9)");
    }
    if (std::abs(norm - 1.0) > 1e-12) {
        moment.normalize();
    }
    return moment;
}

std::string modelName(AnalyzerModel model) {
    return model == AnalyzerModel::Probabilistic ? "probabilistic" : "dlm";
}

std::string formatName(OutputFormat format) {
    return format == OutputFormat::Csv ? "csv" : "json";
}

std::string defaultOutputPath(const RunManifest& m) {
    return subcommandName(m.experiment) + "." + formatName(m.format);
}

// ---------------------------------------------------------------------------
// Row building

UncertaintyRow buildUncertaintyRow(const PhiTables& point, std::vector<std::string>& notes) {
    const auto momentsX = stats::momentsOf(stats::frequencies(point.tableX));
    const auto momentsY = stats::momentsOf(stats::frequencies(point.tableY));
    const auto seX = stats::momentStderr(point.tableX);
    const auto seY = stats::momentStderr(point.tableY);
    const auto estimate = stats::epsilonEtaFromCounts(point.tableX, point.tableY);
    const auto record = stats::ozawaCheck(point.phi, estimate);
    if (estimate.epsilonClamped) {
        notes.push_back("epsilon^2 clamped to 0 at phi=" + formatDouble(point.phi));
    }
    if (estimate.etaClamped) {
        notes.push_back("eta^2 clamped to 0 at phi=" + formatDouble(point.phi));
    }

    const auto thX = oracle::expectations(Vec3::UnitX(), point.phi);
    const auto thY = oracle::expectations(Vec3::UnitY(), point.phi);
    const auto thU = oracle::theoryEpsilonEta(point.phi);

    UncertaintyRow row{};
    row.phi = point.phi;
    row.s1X = momentsX.s1;
    row.s2X = momentsX.s2;
    row.s12X = momentsX.s12;
    row.s1Y = momentsY.s1;
    row.s2Y = momentsY.s2;
    row.s12Y = momentsY.s12;
    row.epsilon = record.epsilon;
    row.eta = record.eta;
    row.ozawaLhs = record.ozawaLhs;
    row.heisenbergProduct = record.heisenbergProduct;
    row.bound = record.bound;
    row.thS1X = thX.s1;
    row.thS2X = thX.s2;
    row.thS12 = thX.s12;
    row.thS1Y = thY.s1;
    row.thS2Y = thY.s2;
    row.thEpsilon = thU.epsilon;
    row.thEta = thU.eta;
    row.thOzawaLhs = oracle::ozawaLhsTheory(point.phi);
    row.thHeisenbergProduct = oracle::heisenbergProductTheory(point.phi);
    row.seS1X = seX.s1;
    row.seS2X = seX.s2;
    row.seS12X = seX.s12;
    row.seS1Y = seY.s1;
    row.seS2Y = seY.s2;
    row.seS12Y = seY.s12;
    row.seEpsilon = record.stderrEpsilon;
    row.seEta = record.stderrEta;
    row.seLhs = record.stderrLhs;
    row.seProduct = record.stderrProduct;
    row.detectedX = point.tableX.detected();
    row.detectedY = point.tableY.detected();
    return row;
}

RobertsonRow buildRobertsonRow(const RobertsonPoint& point, std::uint64_t nPerAxis) {
    const auto record =
        stats::robertsonCheck(point.az, point.sigmaX, point.sigmaY, point.sigmaZ, nPerAxis);
    RobertsonRow row{};
    row.az = point.az;
    row.ax = point.direction.x();
    row.ay = point.direction.y();
    row.sigmaX = point.sigmaX;
    row.sigmaY = point.sigmaY;
    row.sigmaZ = point.sigmaZ;
    row.lhs = record.lhs;
    row.rhs = record.rhs;
    row.thBound = point.az * point.az;
    row.seLhs = record.stderrLhs;
    return row;
}

OracleRow buildOracleRow(const Vec3& a, double phi) {
    const auto th = oracle::expectations(a, phi);
    const auto thU = oracle::theoryEpsilonEta(phi);
    OracleRow row{};
    row.phi = phi;
    row.thS1 = th.s1;
    row.thS2 = th.s2;
    row.thS12 = th.s12;
    row.thEpsilon = thU.epsilon;
    row.thEta = thU.eta;
    row.thOzawaLhs = oracle::ozawaLhsTheory(phi);
    row.thHeisenbergProduct = oracle::heisenbergProductTheory(phi);
    row.bound = 1.0;
    return row;
}

// ---------------------------------------------------------------------------
// Serialization

constexpr const char* kUncertaintyColumns =
    "phi,s1_x,s2_x,s12_x,s1_y,s2_y,s12_y,"
    "epsilon,eta,ozawa_lhs,heisenberg_product,bound,"
    "th_s1_x,th_s2_x,th_s12,th_s1_y,th_s2_y,"
    "th_epsilon,th_eta,th_ozawa_lhs,th_heisenberg_product,"
    "se_s1_x,se_s2_x,se_s12_x,se_s1_y,se_s2_y,se_s12_y,"
    "se_epsilon,se_eta,se_ozawa_lhs,se_heisenberg_product,"
    "detected_x,detected_y,seed,n_events,model,gamma";

constexpr const char* kRobertsonColumns =
    "az,a_x,a_y,sigma_x,sigma_y,sigma_z,lhs,rhs,th_bound,se_lhs,seed,n_events";

constexpr const char* kTripleColumns =
    "s1,s2,s3,count,frequency,th_probability,seed,n_events";

constexpr const char* kOracleColumns =
    "phi,th_s1,th_s2,th_s12,th_epsilon,th_eta,th_ozawa_lhs,th_heisenberg_product,bound";

std::string provenanceHeader(const RunManifest& m) {
    std::string out = "# spinsim ";
    out += kVersion;
    out += "\n# flags: " + joinFlags(canonicalFlags(m));
    out += "\n# seed: " + std::to_string(m.seed) + "\n";
    return out;
}

void appendCsvRow(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += cells[i];
    }
    out += '\n';
}

std::vector<std::string> uncertaintyCells(const UncertaintyRow& r, const RunManifest& m) {
    return {formatDouble(r.phi),
            formatDouble(r.s1X),
            formatDouble(r.s2X),
            formatDouble(r.s12X),
            formatDouble(r.s1Y),
            formatDouble(r.s2Y),
            formatDouble(r.s12Y),
            formatDouble(r.epsilon),
            formatDouble(r.eta),
            formatDouble(r.ozawaLhs),
            formatDouble(r.heisenbergProduct),
            formatDouble(r.bound),
            formatDouble(r.thS1X),
            formatDouble(r.thS2X),
            formatDouble(r.thS12),
            formatDouble(r.thS1Y),
            formatDouble(r.thS2Y),
            formatDouble(r.thEpsilon),
            formatDouble(r.thEta),
            formatDouble(r.thOzawaLhs),
            formatDouble(r.thHeisenbergProduct),
            formatDouble(r.seS1X),
            formatDouble(r.seS2X),
            formatDouble(r.seS12X),
            formatDouble(r.seS1Y),
            formatDouble(r.seS2Y),
            formatDouble(r.seS12Y),
            formatDouble(r.seEpsilon),
            formatDouble(r.seEta),
            formatDouble(r.seLhs),
            formatDouble(r.seProduct),
            std::to_string(r.detectedX),
            std::to_string(r.detectedY),
            std::to_string(m.seed),
            std::to_string(m.nEvents),
            modelName(m.model),
            formatDouble(m.gamma)};
}

std::vector<std::string> robertsonCells(const RobertsonRow& r, const RunManifest& m) {
    return {formatDouble(r.az),     formatDouble(r.ax),     formatDouble(r.ay),
            formatDouble(r.sigmaX), formatDouble(r.sigmaY), formatDouble(r.sigmaZ),
            formatDouble(r.lhs),    formatDouble(r.rhs),    formatDouble(r.thBound),
            formatDouble(r.seLhs),  std::to_string(m.seed), std::to_string(m.nEvents)};
}

std::vector<std::string> tripleCells(const TripleRow& r, const RunManifest& m) {
    return {std::to_string(r.s1),
            std::to_string(r.s2),
            std::to_string(r.s3),
            std::to_string(r.count),
            formatDouble(r.frequency),
            formatDouble(r.thProbability),
            std::to_string(m.seed),
            std::to_string(m.nEvents)};
}

std::vector<std::string> oracleCells(const OracleRow& r) {
    return {formatDouble(r.phi),       formatDouble(r.thS1),
            formatDouble(r.thS2),      formatDouble(r.thS12),
            formatDouble(r.thEpsilon), formatDouble(r.thEta),
            formatDouble(r.thOzawaLhs), formatDouble(r.thHeisenbergProduct),
            formatDouble(r.bound)};
}

std::string buildCsv(const RunManifest& m, const RunResult& result) {
    std::string out = provenanceHeader(m);
    switch (m.experiment) {
    case ExperimentKind::UncertaintySweep:
        out += kUncertaintyColumns;
        out += '\n';
        for (const auto& row : result.uncertainty) {
            appendCsvRow(out, uncertaintyCells(row, m));
        }
        break;
    case ExperimentKind::RobertsonSweep:
        out += kRobertsonColumns;
        out += '\n';
        for (const auto& row : result.robertson) {
            appendCsvRow(out, robertsonCells(row, m));
        }
        break;
    case ExperimentKind::FilteringTriple:
        out += kTripleColumns;
        out += '\n';
        for (const auto& row : result.triple) {
            appendCsvRow(out, tripleCells(row, m));
        }
        break;
    case ExperimentKind::OracleTable:
        out += kOracleColumns;
        out += '\n';
        for (const auto& row : result.oracle) {
            appendCsvRow(out, oracleCells(row));
        }
        break;
    }
    return out;
}

nlohmann::ordered_json uncertaintyObject(const UncertaintyRow& r, const RunManifest& m) {
    nlohmann::ordered_json o;
    o["phi"] = r.phi;
    o["s1_x"] = r.s1X;
    o["s2_x"] = r.s2X;
    o["s12_x"] = r.s12X;
    o["s1_y"] = r.s1Y;
    o["s2_y"] = r.s2Y;
    o["s12_y"] = r.s12Y;
    o["epsilon"] = r.epsilon;
    o["eta"] = r.eta;
    o["ozawa_lhs"] = r.ozawaLhs;
    o["heisenberg_product"] = r.heisenbergProduct;
    o["bound"] = r.bound;
    o["th_s1_x"] = r.thS1X;
    o["th_s2_x"] = r.thS2X;
    o["th_s12"] = r.thS12;
    o["th_s1_y"] = r.thS1Y;
    o["th_s2_y"] = r.thS2Y;
    o["th_epsilon"] = r.thEpsilon;
    o["th_eta"] = r.thEta;
    o["th_ozawa_lhs"] = r.thOzawaLhs;
    o["th_heisenberg_product"] = r.thHeisenbergProduct;
    o["se_s1_x"] = r.seS1X;
    o["se_s2_x"] = r.seS2X;
    o["se_s12_x"] = r.seS12X;
    o["se_s1_y"] = r.seS1Y;
    o["se_s2_y"] = r.seS2Y;
    o["se_s12_y"] = r.seS12Y;
    o["se_epsilon"] = r.seEpsilon;
    o["se_eta"] = r.seEta;
    o["se_ozawa_lhs"] = r.seLhs;
    o["se_heisenberg_product"] = r.seProduct;
    o["detected_x"] = r.detectedX;
    o["detected_y"] = r.detectedY;
    o["seed"] = m.seed;
    o["n_events"] = m.nEvents;
    o["model"] = modelName(m.model);
    o["gamma"] = m.gamma;
    return o;
}

nlohmann::ordered_json robertsonObject(const RobertsonRow& r, const RunManifest& m) {
    nlohmann::ordered_json o;
    o["az"] = r.az;
    o["a_x"] = r.ax;
    o["a_y"] = r.ay;
    o["sigma_x"] = r.sigmaX;
    o["sigma_y"] = r.sigmaY;
    o["sigma_z"] = r.sigmaZ;
    o["lhs"] = r.lhs;
    o["rhs"] = r.rhs;
    o["th_bound"] = r.thBound;
    o["se_lhs"] = r.seLhs;
    o["seed"] = m.seed;
    o["n_events"] = m.nEvents;
    return o;
}

nlohmann::ordered_json tripleObject(const TripleRow& r, const RunManifest& m) {
    nlohmann::ordered_json o;
    o["s1"] = r.s1;
    o["s2"] = r.s2;
    o["s3"] = r.s3;
    o["count"] = r.count;
    o["frequency"] = r.frequency;
    o["th_probability"] = r.thProbability;
    o["seed"] = m.seed;
    o["n_events"] = m.nEvents;
    return o;
}

nlohmann::ordered_json oracleObject(const OracleRow& r) {
    nlohmann::ordered_json o;
    o["phi"] = r.phi;
    o["th_s1"] = r.thS1;
    o["th_s2"] = r.thS2;
    o["th_s12"] = r.thS12;
    o["th_epsilon"] = r.thEpsilon;
    o["th_eta"] = r.thEta;
    o["th_ozawa_lhs"] = r.thOzawaLhs;
    o["th_heisenberg_product"] = r.thHeisenbergProduct;
    o["bound"] = r.bound;
    return o;
}

std::string buildJson(const RunManifest& m, const RunResult& result) {
    nlohmann::ordered_json doc;
    doc["provenance"] = {{"version", kVersion},
                         {"flags", joinFlags(canonicalFlags(m))},
                         {"seed", m.seed}};
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    switch (m.experiment) {
    case ExperimentKind::UncertaintySweep:
        for (const auto& row : result.uncertainty) {
            rows.push_back(uncertaintyObject(row, m));
        }
        break;
    case ExperimentKind::RobertsonSweep:
        for (const auto& row : result.robertson) {
            rows.push_back(robertsonObject(row, m));
        }
        break;
    case ExperimentKind::FilteringTriple:
        for (const auto& row : result.triple) {
            rows.push_back(tripleObject(row, m));
        }
        break;
    case ExperimentKind::OracleTable:
        for (const auto& row : result.oracle) {
            rows.push_back(oracleObject(row));
        }
        break;
    }
    doc["rows"] = rows;
    return doc.dump(2) + "\n";
}

void writeFileAtomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open '" + tmp.string() + "' for writing: " +
                          std::strerror(errno));
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write to '" + tmp.string() + "' failed: " + std::strerror(errno));
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw IoError("cannot move '" + tmp.string() + "' to '" + target.string() +
                      "': " + ec.message());
    }
}

// ---------------------------------------------------------------------------
// Plot emission

struct LabPoint {
    double phi;
    double ozawaLhs;
    double heisenbergProduct;
};

std::vector<LabPoint> readLabData(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open lab data file '" + path + "': " + std::strerror(errno));
    }
    std::vector<LabPoint> points;
    std::string line;
    std::size_t lineNumber = 0;
    bool headerAllowed = true;
    while (std::getline(in, line)) {
        ++lineNumber;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::array<double, 3> v{};
        std::stringstream ss(line);
        std::string field;
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) {
            if (!std::getline(ss, field, ',')) {
                ok = false;
                break;
            }
            try {
                std::size_t used = 0;
                v[static_cast<std::size_t>(i)] = std::stod(field, &used);
                ok = used == field.size();
            } catch (const std::exception&) {
                ok = false;
            }
        }
        std::string extra;
        if (ok && std::getline(ss, extra, ',')) {
            ok = false;
        }
        if (!ok) {
            if (headerAllowed) { // a single leading column-name line is fine
                headerAllowed = false;
                continue;
            }
            throw IoError("lab data file '" + path + "' line " + std::to_string(lineNumber) +
                          ": expected 'phi,ozawa_lhs,heisenberg_product'");
        }
        headerAllowed = false;
        points.push_back({v[0], v[1], v[2]});
    }
    if (points.empty()) {
        throw IoError("lab data file '" + path + "' holds no data rows");
    }
    return points;
}

std::string plotStem(const RunManifest& m) {
    fs::path p(m.outputPath);
    p.replace_extension();
    return p.string();
}

void emitUncertaintyPlots(const RunManifest& m, const RunResult& result) {
    const std::string stem = plotStem(m);
    const std::string base = fs::path(stem).filename().string();
    const std::string header = provenanceHeader(m);

    std::string ex = header + "# columns: phi,s1,s2,s12,th_s1,th_s2,th_s12\n";
    std::string ey = ex;
    std::string bounds =
        header +
        "# columns: phi,ozawa_lhs,heisenberg_product,th_ozawa_lhs,th_heisenberg_product,bound\n";
    for (const auto& r : result.uncertainty) {
        appendCsvRow(ex, {formatDouble(r.phi), formatDouble(r.s1X), formatDouble(r.s2X),
                          formatDouble(r.s12X), formatDouble(r.thS1X), formatDouble(r.thS2X),
                          formatDouble(r.thS12)});
        appendCsvRow(ey, {formatDouble(r.phi), formatDouble(r.s1Y), formatDouble(r.s2Y),
                          formatDouble(r.s12Y), formatDouble(r.thS1Y), formatDouble(r.thS2Y),
                          formatDouble(r.thS12)});
        appendCsvRow(bounds, {formatDouble(r.phi), formatDouble(r.ozawaLhs),
                              formatDouble(r.heisenbergProduct), formatDouble(r.thOzawaLhs),
                              formatDouble(r.thHeisenbergProduct), formatDouble(r.bound)});
    }
    writeFileAtomic(stem + ".expectations_x.csv", ex);
    writeFileAtomic(stem + ".expectations_y.csv", ey);
    writeFileAtomic(stem + ".bounds.csv", bounds);

    const bool lab = !m.labDataPath.empty();
    if (lab) {
        std::string overlay = header + "# columns: phi,ozawa_lhs,heisenberg_product\n";
        for (const auto& p : readLabData(m.labDataPath)) {
            appendCsvRow(overlay, {formatDouble(p.phi), formatDouble(p.ozawaLhs),
                                   formatDouble(p.heisenbergProduct)});
        }
        writeFileAtomic(stem + ".lab.csv", overlay);
    }

    std::string gp = header;
    gp += "set datafile separator comma\n"
          "set terminal svg size 900,620\n"
          "set key outside\n"
          "set xlabel 'detuning angle (rad)'\n\n";
    for (const char axis : {'x', 'y'}) {
        gp += std::string("set output '") + base + ".expectations_" + axis + ".svg'\n";
        gp += std::string("set title 'expectation values, initial moment along ") + axis +
              "'\n";
        gp += std::string("plot '") + base + ".expectations_" + axis +
              ".csv' using 1:2 with points pt 7 title '<S1> sim', \\\n"
              "     '' using 1:3 with points pt 5 title '<S2> sim', \\\n"
              "     '' using 1:4 with points pt 6 title '<S1 S2> sim', \\\n"
              "     '' using 1:5 with lines title '<S1> theory', \\\n"
              "     '' using 1:6 with lines title '<S2> theory', \\\n"
              "     '' using 1:7 with lines title '<S1 S2> theory'\n\n";
    }
    gp += std::string("set output '") + base + ".bounds.svg'\n";
    gp += "set title 'error-disturbance inequality sides'\n";
    gp += std::string("plot '") + base +
          ".bounds.csv' using 1:2 with points pt 7 title 'lhs sim', \\\n"
          "     '' using 1:3 with points pt 5 title 'product sim', \\\n"
          "     '' using 1:4 with lines title 'lhs theory', \\\n"
          "     '' using 1:5 with lines title 'product theory', \\\n"
          "     '' using 1:6 with lines lw 2 title 'bound'";
    if (lab) {
        gp += std::string(", \\\n     '") + base +
              ".lab.csv' using 1:2 with points pt 9 title 'lhs lab', \\\n"
              "     '' using 1:3 with points pt 11 title 'product lab'";
    }
    gp += "\n";
    writeFileAtomic(stem + ".plot.gp", gp);
}

void emitRobertsonPlots(const RunManifest& m, const RunResult& result) {
    const std::string stem = plotStem(m);
    const std::string base = fs::path(stem).filename().string();
    const std::string header = provenanceHeader(m);

    std::string bounds = header + "# columns: az,lhs,rhs,th_bound\n";
    for (const auto& r : result.robertson) {
        appendCsvRow(bounds, {formatDouble(r.az), formatDouble(r.lhs), formatDouble(r.rhs),
                              formatDouble(r.thBound)});
    }
    writeFileAtomic(stem + ".bounds.csv", bounds);

    std::string gp = header;
    gp += "set datafile separator comma\n"
          "set terminal svg size 900,620\n"
          "set key outside\n"
          "set xlabel 'a_z'\n\n";
    gp += std::string("set output '") + base + ".bounds.svg'\n";
    gp += "set title 'variance relation sides'\n";
    gp += std::string("plot '") + base +
          ".bounds.csv' using 1:2 with points pt 7 title '(1-<sx>^2)(1-<sy>^2)', \\\n"
          "     '' using 1:3 with points pt 5 title '<sz>^2', \\\n"
          "     '' using 1:4 with lines lw 2 title 'a_z^2 bound'\n";
    writeFileAtomic(stem + ".plot.gp", gp);
}

} // namespace

std::string formatDouble(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string subcommandName(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::UncertaintySweep:
        return "uncertainty-sweep";
    case ExperimentKind::FilteringTriple:
        return "filtering-triple";
    case ExperimentKind::RobertsonSweep:
        return "robertson-sweep";
    case ExperimentKind::OracleTable:
        return "oracle-table";
    }
    return "";
}

bool operator==(const RunManifest& a, const RunManifest& b) {
    return a.experiment == b.experiment && a.seed == b.seed && a.nEvents == b.nEvents &&
           a.model == b.model && a.gamma == b.gamma && a.phiStart == b.phiStart &&
           a.phiEnd == b.phiEnd && a.phiStep == b.phiStep && a.theta3 == b.theta3 &&
           a.theta5 == b.theta5 && a.explicitStage1 == b.explicitStage1 &&
           a.dlmWarmup == b.dlmWarmup && a.initialMoment.x() == b.initialMoment.x() &&
           a.initialMoment.y() == b.initialMoment.y() &&
           a.initialMoment.z() == b.initialMoment.z() && a.triplePhi == b.triplePhi &&
           a.azStep == b.azStep && a.outputPath == b.outputPath && a.format == b.format &&
           a.emitPlots == b.emitPlots && a.labDataPath == b.labDataPath;
}

RunManifest parseCli(const std::vector<std::string>& args) {
    RunManifest m;
    CLI::App app{"event-by-event simulator of successive spin-1/2 filtering measurements"};
    app.require_subcommand(1);

    const std::map<std::string, AnalyzerModel> models{{"probabilistic",
                                                       AnalyzerModel::Probabilistic},
                                                      {"dlm", AnalyzerModel::Dlm}};
    const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::Csv},
                                                      {"json", OutputFormat::Json}};
    std::string momentText;

    auto addCommon = [&](CLI::App* cmd, bool withEvents) {
        cmd->add_option("--seed", m.seed, "master seed; every stream derives from it")
            ->required();
        if (withEvents) {
            cmd->add_option("--n-events", m.nEvents, "messengers per setting")
                ->check(CLI::PositiveNumber);
        }
        cmd->add_option("--output", m.outputPath, "output file path");
        cmd->add_option("--format", m.format, "output format")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    };
    auto addPhiGrid = [&](CLI::App* cmd) {
        cmd->add_option("--phi-start", m.phiStart, "first detuning angle (rad)");
        cmd->add_option("--phi-end", m.phiEnd, "grid end, exclusive (rad)");
        cmd->add_option("--phi-step", m.phiStep, "grid step (rad)");
    };
    auto addMoment = [&](CLI::App* cmd) {
        cmd->add_option("--initial-moment", momentText, "x, y, z or ax,ay,az (unit vector)");
    };

    CLI::App* sweep = app.add_subcommand(
        "uncertainty-sweep",
        "two successive analyzers over a detuning grid; error/disturbance estimators");
    addCommon(sweep, true);
    addPhiGrid(sweep);
    sweep->add_option("--model", m.model, "spin-analyzer model")
        ->transform(CLI::CheckedTransformer(models, CLI::ignore_case));
    sweep->add_option("--gamma", m.gamma, "DLM learning parameter in [0,1)");
    sweep->add_option("--theta3", m.theta3, "free rotation before the first analyzer (rad)");
    sweep->add_option("--theta5", m.theta5, "free rotation before the second analyzer (rad)");
    sweep->add_flag("--explicit-stage1", m.explicitStage1,
                    "run the preparation devices instead of emitting the prepared moment");
    sweep->add_option("--warmup", m.dlmWarmup, "DLM events discarded before statistics");
    CLI::Option* plots = sweep->add_flag("--emit-plots", m.emitPlots,
                                         "also write per-figure data files and a gnuplot script");
    sweep->add_option("--lab-data", m.labDataPath,
                      "CSV of measured (phi,ozawa_lhs,heisenberg_product) points to overlay")
        ->needs(plots);

    CLI::App* triple = app.add_subcommand(
        "filtering-triple", "three successive splitting analyzers; eight-beam counts");
    addCommon(triple, true);
    addMoment(triple);
    triple->add_option("--phi", m.triplePhi,
                       "angle of the first/third analyzer axes in the x-y plane (rad)");

    CLI::App* robertson = app.add_subcommand(
        "robertson-sweep", "single analyzers along +-x, +-y, +-z over an a_z grid");
    addCommon(robertson, true);
    robertson->add_option("--az-step", m.azStep, "a_z grid step over [-1,1]");
    robertson->add_flag("--emit-plots", m.emitPlots,
                        "also write per-figure data files and a gnuplot script");

    CLI::App* table = app.add_subcommand("oracle-table", "closed-form theory values only");
    addCommon(table, false);
    addPhiGrid(table);
    addMoment(table);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (app.got_subcommand(sweep)) {
        m.experiment = ExperimentKind::UncertaintySweep;
    } else if (app.got_subcommand(triple)) {
        m.experiment = ExperimentKind::FilteringTriple;
    } else if (app.got_subcommand(robertson)) {
        m.experiment = ExperimentKind::RobertsonSweep;
    } else {
        m.experiment = ExperimentKind::OracleTable;
    }

    if (!momentText.empty()) {
        m.initialMoment = parseMoment(momentText);
    }
    if (!(m.gamma >= 0.0 && m.gamma < 1.0)) {
        throw UsageError("--gamma must lie in [0,1)");
    }
    if (!(m.phiStep > 0.0)) {
        throw UsageError("--phi-step must be positive");
    }
    if (!(m.phiEnd > m.phiStart)) {
        throw UsageError("--phi-end must exceed --phi-start");
    }
    if (!(m.azStep > 0.0 && m.azStep <= 2.0)) {
        throw UsageError("--az-step must lie in (0,2]");
    }
    if (m.outputPath.empty()) {
        m.outputPath = defaultOutputPath(m);
    }
    return m;
}

std::vector<std::string> canonicalFlags(const RunManifest& m) {
    std::vector<std::string> flags{subcommandName(m.experiment), "--seed",
                                   std::to_string(m.seed)};
    auto add = [&](const char* flag, const std::string& value) {
        flags.emplace_back(flag);
        flags.push_back(value);
    };
    switch (m.experiment) {
    case ExperimentKind::UncertaintySweep:
        add("--n-events", std::to_string(m.nEvents));
        add("--model", modelName(m.model));
        add("--gamma", formatDouble(m.gamma));
        add("--phi-start", formatDouble(m.phiStart));
        add("--phi-end", formatDouble(m.phiEnd));
        add("--phi-step", formatDouble(m.phiStep));
        add("--theta3", formatDouble(m.theta3));
        add("--theta5", formatDouble(m.theta5));
        add("--warmup", std::to_string(m.dlmWarmup));
        if (m.explicitStage1) {
            flags.emplace_back("--explicit-stage1");
        }
        if (m.emitPlots) {
            flags.emplace_back("--emit-plots");
        }
        if (!m.labDataPath.empty()) {
            add("--lab-data", m.labDataPath);
        }
        break;
    case ExperimentKind::FilteringTriple:
        add("--n-events", std::to_string(m.nEvents));
        add("--initial-moment", formatMoment(m.initialMoment));
        add("--phi", formatDouble(m.triplePhi));
        break;
    case ExperimentKind::RobertsonSweep:
        add("--n-events", std::to_string(m.nEvents));
        add("--az-step", formatDouble(m.azStep));
        if (m.emitPlots) {
            flags.emplace_back("--emit-plots");
        }
        break;
    case ExperimentKind::OracleTable:
        add("--phi-start", formatDouble(m.phiStart));
        add("--phi-end", formatDouble(m.phiEnd));
        add("--phi-step", formatDouble(m.phiStep));
        add("--initial-moment", formatMoment(m.initialMoment));
        break;
    }
    add("--output", m.outputPath);
    add("--format", formatName(m.format));
    return flags;
}

RunResult runManifest(const RunManifest& m) {
    RunResult result;
    switch (m.experiment) {
    case ExperimentKind::UncertaintySweep: {
        UncertaintyRunConfig cfg;
        cfg.detuningGrid = buildPhiGrid(m.phiStart, m.phiEnd, m.phiStep);
        cfg.eventsPerSetting = m.nEvents;
        cfg.model = m.model;
        cfg.gamma = m.gamma;
        cfg.masterSeed = m.seed;
        cfg.theta3 = m.theta3;
        cfg.theta5 = m.theta5;
        cfg.explicitStage1 = m.explicitStage1;
        cfg.dlmWarmup = m.dlmWarmup;
        for (const auto& point : runUncertaintySweep(cfg)) {
            result.uncertainty.push_back(buildUncertaintyRow(point, result.notes));
        }
        break;
    }
    case ExperimentKind::FilteringTriple: {
        const Vec3 planeAxis(std::cos(m.triplePhi), std::sin(m.triplePhi), 0.0);
        const TripleCountTable table = runFilteringTriple(
            m.initialMoment, planeAxis, Vec3::UnitY(), planeAxis, m.nEvents, m.seed);
        const auto theory =
            oracle::probTriple(m.initialMoment, planeAxis, Vec3::UnitY(), planeAxis);
        for (int s1 : {+1, -1}) {
            for (int s2 : {+1, -1}) {
                for (int s3 : {+1, -1}) {
                    TripleRow row{};
                    row.s1 = s1;
                    row.s2 = s2;
                    row.s3 = s3;
                    row.count = table.cell(s1, s2, s3);
                    row.frequency = static_cast<double>(row.count) /
                                    static_cast<double>(table.emitted);
                    row.thProbability = theory.at(s1, s2, s3);
                    result.triple.push_back(row);
                }
            }
        }
        break;
    }
    case ExperimentKind::RobertsonSweep: {
        RobertsonRunConfig cfg;
        cfg.azGrid = buildAzGrid(m.azStep);
        cfg.eventsPerAxis = m.nEvents;
        cfg.masterSeed = m.seed;
        for (const auto& point : runRobertsonSweep(cfg)) {
            result.robertson.push_back(buildRobertsonRow(point, cfg.eventsPerAxis));
        }
        break;
    }
    case ExperimentKind::OracleTable: {
        for (double phi : buildPhiGrid(m.phiStart, m.phiEnd, m.phiStep)) {
            result.oracle.push_back(buildOracleRow(m.initialMoment, phi));
        }
        break;
    }
    }
    return result;
}

void writeResults(const RunManifest& m, const RunResult& result) {
    const bool empty = result.uncertainty.empty() && result.robertson.empty() &&
                       result.triple.empty() && result.oracle.empty();
    if (empty) {
        throw IoError("refusing to write '" + m.outputPath + "': no result rows");
    }
    writeFileAtomic(m.outputPath,
                    m.format == OutputFormat::Csv ? buildCsv(m, result) : buildJson(m, result));
}

void emitPlotData(const RunManifest& m, const RunResult& result) {
    switch (m.experiment) {
    case ExperimentKind::UncertaintySweep:
        emitUncertaintyPlots(m, result);
        break;
    case ExperimentKind::RobertsonSweep:
        emitRobertsonPlots(m, result);
        break;
    default:
        throw ConfigError("plot emission is only available for the sweep experiments");
    }
}

} // namespace spinsim::io
