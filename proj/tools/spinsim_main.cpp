#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "spinsim/errors.hpp"
#include "spinsim/io.hpp"

int main(int argc, char** argv) {
    using namespace spinsim;
    const std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const io::RunManifest manifest = io::parseCli(args);
        const io::RunResult result = io::runManifest(manifest);
        for (const auto& note : result.notes) {
            std::cerr << "note: " << note << "\n";
        }
        io::writeResults(manifest, result);
        std::cout << "wrote " << manifest.outputPath << "\n";
        if (manifest.emitPlots) {
            io::emitPlotData(manifest, result);
            std::cout << "wrote plot data and script next to " << manifest.outputPath << "\n";
        }
        return 0;
    } catch (const io::HelpRequested& help) {
        std::cout << help.text;
        return 0;
    } catch (const io::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}
