#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsim/devices.hpp"
#include "spinsim/spin.hpp"

namespace spinsim::io {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { UncertaintySweep, FilteringTriple, RobertsonSweep, OracleTable };
enum class OutputFormat { Csv, Json };

// Invalid or missing command-line flags; the message names the flag.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --help was requested; carries the flag reference to print.
struct HelpRequested {
    std::string text;
};

// Fully validated run configuration. Every output file records the canonical
// flag list that reconstructs its manifest.
struct RunManifest {
    ExperimentKind experiment = ExperimentKind::UncertaintySweep;
    std::uint64_t seed = 0;
    std::uint64_t nEvents = 10000;
    AnalyzerModel model = AnalyzerModel::Probabilistic;
    double gamma = 0.999;
    double phiStart = 0.0;
    double phiEnd = kTwoPi;
    double phiStep = kTwoPi / 48.0;
    double theta3 = 0.0;
    double theta5 = 0.0;
    bool explicitStage1 = false;
    std::uint64_t dlmWarmup = 1000;
    Vec3 initialMoment = Vec3::UnitX();
    double triplePhi = M_PI / 4.0;
    double azStep = 0.05;
    std::string outputPath; // defaulted per subcommand when empty
    OutputFormat format = OutputFormat::Csv;
    bool emitPlots = false;
    std::string labDataPath;

    friend bool operator==(const RunManifest& a, const RunManifest& b);
};

std::string subcommandName(ExperimentKind kind);

// Parses subcommand + flags. Throws UsageError on bad input and
// HelpRequested for --help.
RunManifest parseCli(const std::vector<std::string>& args);

// Canonical flag list, starting with the subcommand token. Parsing it
// reconstructs an equal manifest.
std::vector<std::string> canonicalFlags(const RunManifest& manifest);

// Result rows, one struct per experiment family.

struct UncertaintyRow {
    double phi;
    double s1X, s2X, s12X;
    double s1Y, s2Y, s12Y;
    double epsilon, eta, ozawaLhs, heisenbergProduct, bound;
    double thS1X, thS2X, thS12, thS1Y, thS2Y;
    double thEpsilon, thEta, thOzawaLhs, thHeisenbergProduct;
    double seS1X, seS2X, seS12X, seS1Y, seS2Y, seS12Y;
    double seEpsilon, seEta, seLhs, seProduct;
    std::uint64_t detectedX, detectedY;
};

struct RobertsonRow {
    double az;
    double ax, ay;
    double sigmaX, sigmaY, sigmaZ;
    double lhs, rhs, thBound;
    double seLhs;
};

struct TripleRow {
    int s1, s2, s3;
    std::uint64_t count;
    double frequency;
    double thProbability;
};

struct OracleRow {
    double phi;
    double thS1, thS2, thS12;
    double thEpsilon, thEta, thOzawaLhs, thHeisenbergProduct;
    double bound;
};

struct RunResult {
    std::vector<UncertaintyRow> uncertainty;
    std::vector<RobertsonRow> robertson;
    std::vector<TripleRow> triple;
    std::vector<OracleRow> oracle;
    std::vector<std::string> notes; // e.g. estimator clamp events
};

// Executes the manifest's experiment and assembles result rows.
RunResult runManifest(const RunManifest& manifest);

// Serializes the rows to manifest.outputPath as CSV (with a '#' provenance
// header) or JSON (with a provenance object). Writing is atomic: no partial
// files survive a failure, and reruns with the same manifest are
// byte-identical. Throws IoError with path and cause.
void writeResults(const RunManifest& manifest, const RunResult& result);

// Emits per-figure data files and a gnuplot script next to the main output:
// expectation curves per initial moment, inequality sides versus detuning
// angle with the bound line at 1, and the variance-relation sides versus
// a_z with the a_z^2 theory curve. An optional lab-data CSV
// (phi,ozawa_lhs,heisenberg_product) is validated and overlaid.
void emitPlotData(const RunManifest& manifest, const RunResult& result);

// Shortest-width formatting with up to 17 significant digits ("%.17g").
std::string formatDouble(double value);

} // namespace spinsim::io
