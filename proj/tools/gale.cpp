// Command-line front end: encode/decode block-coded containers, run the
// dimension analyzer, and run the self-test suites.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gale/analysis.hpp"
#include "gale/container.hpp"
#include "gale/selftest.hpp"

namespace {

constexpr int kExitSpec = 2;
constexpr int kExitIo = 3;
constexpr int kExitCorrupt = 4;
constexpr int kExitRange = 5;

struct ExitWith {
    int code;
    std::string message;
};

gale::BitString read_bit_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ExitWith{kExitIo, "cannot open " + path};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    std::string bits;
    for (char c : text) {
        if (c == '0' || c == '1') {
            bits.push_back(c);
        } else if (c != '\n' && c != '\r' && c != ' ' && c != '\t') {
            throw ExitWith{kExitSpec, "file source must contain ASCII bits: " + path};
        }
    }
    return gale::BitString::parse(bits);
}

gale::SourcePtr make_source(const std::string& spec) {
    if (spec.rfind("file:", 0) == 0)
        return std::make_shared<gale::FixedSource>(read_bit_file(spec.substr(5)));
    return gale::source_from_spec(spec);
}

gale::BlockSchedule make_schedule(bool paper, std::uint16_t k_max) {
    return paper ? gale::BlockSchedule::paper() : gale::BlockSchedule::capped(k_max);
}

void write_file(const std::string& path, const void* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ExitWith{kExitIo, "cannot open " + path + " for writing"};
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw ExitWith{kExitIo, "write failed: " + path};
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ExitWith{kExitIo, "cannot open " + path};
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    return std::vector<std::uint8_t>(text.begin(), text.end());
}

int cmd_encode(const std::string& source_spec, const std::string& model_spec, bool paper,
               std::uint16_t k_max, std::uint32_t blocks, const std::string& out_path) {
    auto source = make_source(source_spec);
    auto model = gale::model_from_spec(model_spec);
    auto sched = make_schedule(paper, k_max);
    gale::OracleStream stream = gale::encode_blocks(*source, *model, sched, blocks);
    std::vector<std::uint8_t> bytes = gale::write_container(stream);
    write_file(out_path, bytes.data(), bytes.size());
    return 0;
}

int cmd_decode(const std::string& container_path, std::uint64_t n, bool raw) {
    std::vector<std::uint8_t> bytes = read_file(container_path);
    gale::OracleStream stream = gale::read_container(bytes);

    gale::BitString bits;
    std::uint64_t usage = 0;
    if (stream.block_coded) {
        if (n > stream.schedule.n(stream.block_count))
            throw ExitWith{kExitRange, "prefix length beyond the encoded blocks"};
        std::size_t pos = 0;
        gale::ModelPtr model = gale::parse_model_bytes(stream.model_spec, pos);
        auto decoded = gale::decode_prefix(stream, n, *model, stream.schedule);
        bits = std::move(decoded.first);
        usage = decoded.second;
    } else {
        if (n > stream.payload.size())
            throw ExitWith{kExitRange, "prefix length beyond the stored bits"};
        auto decoded = gale::passthrough_decode(stream, n);
        bits = std::move(decoded.first);
        usage = decoded.second;
    }

    if (raw) {
        std::vector<std::uint8_t> packed((bits.size() + 7) / 8, 0);
        for (std::size_t i = 0; i < bits.size(); ++i)
            packed[i / 8] |= static_cast<std::uint8_t>(bits[i] ? 1 : 0) << (7 - (i % 8));
        std::fwrite(packed.data(), 1, packed.size(), stdout);
    } else {
        std::cout << bits.str() << "\n";
    }
    std::cerr << "usage=" << usage << " n=" << n;
    if (n > 0) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", static_cast<double>(usage) / static_cast<double>(n));
        std::cerr << " ratio=" << buf;
    }
    std::cerr << "\n";
    return 0;
}

int cmd_analyze(const std::string& source_spec, const std::string& model_spec, bool paper,
                std::uint16_t k_max, std::uint32_t blocks, const std::string& csv_path) {
    if (csv_path.empty()) throw ExitWith{kExitIo, "no output path for the CSV report"};
    auto source = make_source(source_spec);
    auto model = gale::model_from_spec(model_spec);
    auto sched = make_schedule(paper, k_max);
    gale::DimensionReport report = gale::dimension_report(*source, *model, sched, blocks);
    std::string csv = gale::export_csv(report);
    write_file(csv_path, csv.data(), csv.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"martingale-driven enumerative block compression toolkit"};
    app.require_subcommand(1);

    std::string source_spec = "zeros";
    std::string model_spec = "kt";
    std::string out_path;
    std::string container_path;
    std::string csv_path;
    bool paper = false;
    bool raw = false;
    std::uint16_t k_max = 24;
    std::uint32_t blocks = 1;
    std::uint64_t n = 0;

    auto* enc = app.add_subcommand("encode", "compress a source prefix into a container");
    enc->add_option("--source", source_spec, "source spec");
    enc->add_option("--model", model_spec, "martingale model spec");
    enc->add_flag("--paper-schedule", paper, "unbounded block growth");
    enc->add_option("--kmax", k_max, "cap block lengths at this value");
    enc->add_option("-B,--blocks", blocks, "number of blocks to encode");
    enc->add_option("-o,--out", out_path, "output container path")->required();

    auto* dcd = app.add_subcommand("decode", "reconstruct a prefix from a container");
    dcd->add_option("container", container_path, "container path")->required();
    dcd->add_option("-n,--bits", n, "prefix length to reconstruct")->required();
    dcd->add_flag("--raw", raw, "write packed bytes instead of ASCII bits");

    auto* ana = app.add_subcommand("analyze", "per-block dimension report as CSV");
    ana->add_option("--source", source_spec, "source spec");
    ana->add_option("--model", model_spec, "martingale model spec");
    ana->add_flag("--paper-schedule", paper, "unbounded block growth");
    ana->add_option("--kmax", k_max, "cap block lengths at this value");
    ana->add_option("-B,--blocks", blocks, "number of blocks to analyze");
    ana->add_option("--csv", csv_path, "output CSV path");

    auto* self = app.add_subcommand("selftest", "run the module property suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitSpec;
    }

    try {
        if (enc->parsed()) return cmd_encode(source_spec, model_spec, paper, k_max, blocks, out_path);
        if (dcd->parsed()) return cmd_decode(container_path, n, raw);
        if (ana->parsed()) return cmd_analyze(source_spec, model_spec, paper, k_max, blocks, csv_path);
        if (self->parsed()) return gale::run_selftests(std::cout) ? 0 : 1;
    } catch (const ExitWith& e) {
        std::cerr << "gale: " << e.message << "\n";
        return e.code;
    } catch (const gale::MalformedCode& e) {
        std::cerr << "gale: corrupt container: " << e.what() << "\n";
        return kExitCorrupt;
    } catch (const gale::ModelMismatch& e) {
        std::cerr << "gale: " << e.what() << "\n";
        return kExitCorrupt;
    } catch (const gale::IndexOutOfRange& e) {
        std::cerr << "gale: corrupt container: " << e.what() << "\n";
        return kExitCorrupt;
    } catch (const gale::InsufficientBlocks& e) {
        std::cerr << "gale: " << e.what() << "\n";
        return kExitRange;
    } catch (const gale::TraversalBudgetExceeded& e) {
        std::cerr << "gale: " << e.what() << "\n";
        return kExitCorrupt;
    } catch (const gale::Error& e) {
        std::cerr << "gale: " << e.what() << "\n";
        return kExitSpec;
    } catch (const std::exception& e) {
        std::cerr << "gale: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
