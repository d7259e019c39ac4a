// Copyright 2026 The epg Authors
// SPDX-License-Identifier: Apache-2.0

// epg: analyze transaction traces, export their graphs, evaluate traversals.
//
// Exit codes: 0 no findings, 2 findings, 1 error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "epg/analysis.hpp"
#include "epg/config.hpp"
#include "epg/epg.hpp"
#include "epg/error.hpp"
#include "epg/export.hpp"
#include "epg/traversal.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kClean = 0;
constexpr int kError = 1;
constexpr int kFindings = 2;

void configure_logging() {
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("EPG_LOG")) level = spdlog::level::from_str(env);
    spdlog::set_level(level);
    spdlog::set_pattern("[%l] %v");
}

/// Writes to --out when given, stdout otherwise.
void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
        if (!std::cout) throw epg::Error(epg::ErrorKind::SinkFailure, "cannot write to stdout");
        return;
    }
    std::ofstream os(out);
    os << text;
    if (!os) throw epg::Error(epg::ErrorKind::SinkFailure, "cannot write " + out);
}

struct AnalyzeArgs {
    std::string trace;
    std::string config;
    std::string detectors;
    std::string refinements;
    std::string prices;
    std::string allowlist;
    std::string out;
};

int run_analyze(const AnalyzeArgs& a) {
    epg::DetectorConfig cfg = a.config.empty() ? epg::DetectorConfig{} : epg::load_config(a.config);
    if (!a.detectors.empty()) epg::apply_detectors(cfg, a.detectors);
    if (!a.refinements.empty()) epg::apply_refinements(cfg, a.refinements);
    if (!a.prices.empty()) cfg.prices = a.prices;
    if (!a.allowlist.empty()) cfg.allowlist = a.allowlist;
    cfg.validate();
    epg::PriceTable prices;
    if (cfg.prices) prices = epg::PriceTable::load(*cfg.prices);

    auto one = [&](const fs::path& p) {
        spdlog::info("analyzing {}", p.string());
        auto report = epg::analyze(epg::load_trace_file(p.string()), cfg, prices);
        for (const auto& w : report.warnings) spdlog::warn("{}: {}", p.filename().string(), w);
        spdlog::info("{}: {} finding(s), {} vertices, {} edges", p.filename().string(), report.findings.size(),
                     report.stats.vertex_count, report.stats.edge_count);
        return report;
    };

    bool any = false;
    if (fs::is_directory(a.trace)) {
        // batch mode: one report per file, in file-name order
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(a.trace))
            if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        nlohmann::ordered_json all = nlohmann::ordered_json::array();
        for (const auto& f : files) {
            auto report = one(f);
            any = any || !report.findings.empty();
            nlohmann::ordered_json entry;
            entry["file"] = f.filename().string();
            entry["report"] = epg::to_json(report);
            all.push_back(std::move(entry));
        }
        emit(all.dump(2) + "\n", a.out);
    } else {
        auto report = one(a.trace);
        any = !report.findings.empty();
        emit(epg::to_json(report).dump(2) + "\n", a.out);
    }
    return any ? kFindings : kClean;
}

struct ExportArgs {
    std::string trace;
    std::string graph = "epg";
    std::string format = "dot";
    std::string granularity = "address";
    unsigned frame = 0;
    std::string out;
};

epg::Granularity parse_granularity(const std::string& s) {
    if (s == "address") return epg::Granularity::PerAddress;
    if (s == "invocation") return epg::Granularity::PerInvocation;
    throw CLI::ValidationError("--granularity", "expected address or invocation");
}

int run_export(const ExportArgs& a) {
    const auto format = epg::graph_format_from_string(a.format);
    const auto r = epg::replay(epg::load_trace_file(a.trace));
    epg::VertexRegistry reg;
    reg.granularity = parse_granularity(a.granularity);
    epg::PropertyGraph g;
    if (a.graph == "ctg") {
        g = epg::build_ctg(r, reg);
    } else if (a.graph == "dcfg") {
        if (a.frame >= r.frames.size()) throw CLI::ValidationError("--frame", "no such frame");
        g = epg::build_dcfg(r, a.frame, reg);
    } else if (a.graph == "ddg") {
        g = epg::build_ddg(r, reg);
    } else if (a.graph == "epg") {
        g = epg::build_epg(r, reg.granularity).graph;
    } else {
        throw CLI::ValidationError("--graph", "expected ctg, dcfg, ddg or epg");
    }
    std::ostringstream os;
    epg::export_graph(g, format, os);
    emit(os.str(), a.out);
    return kClean;
}

struct TraverseArgs {
    std::string trace;
    std::string expr;
    std::vector<epg::VertexId> from;
};

/// Expression grammar:
///   expr  := term ('.' term)*            composition, right to left
///   term  := out(L) | in(L) | repeat(expr) | repeat_exclusive(expr) | tcon | '(' expr ')'
/// where L is a label list such as "CALL,JUMP" or a group name (T, CT, C, D, *).
class ExprParser {
  public:
    explicit ExprParser(std::string_view s) : s_{s} {}

    epg::Traversal parse() {
        auto t = expr();
        skip();
        if (pos_ != s_.size()) fail("trailing input");
        return t;
    }

  private:
    epg::Traversal expr() {
        std::vector<epg::Traversal> parts{term()};
        skip();
        while (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            parts.push_back(term());
            skip();
        }
        return parts.size() == 1 ? parts.front() : epg::compose(std::move(parts));
    }

    epg::Traversal term() {
        skip();
        if (eat('(')) {
            auto t = expr();
            expect(')');
            return t;
        }
        const auto name = ident();
        if (name == "tcon") return epg::tcon();
        expect('(');
        if (name == "out" || name == "in") {
            const auto end = s_.find(')', pos_);
            if (end == std::string_view::npos) fail("unclosed label list");
            const auto labels = s_.substr(pos_, end - pos_);
            pos_ = end + 1;
            return name == "out" ? epg::out(labels) : epg::in(labels);
        }
        auto inner = expr();
        expect(')');
        if (name == "repeat") return epg::repeat(std::move(inner));
        if (name == "repeat_exclusive") return epg::repeat_exclusive(std::move(inner));
        fail("unknown combinator '" + name + "'");
    }

    std::string ident() {
        skip();
        const auto start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        if (start == pos_) fail("expected a combinator");
        return std::string(s_.substr(start, pos_ - start));
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw CLI::ValidationError("--expr", why + " at offset " + std::to_string(pos_));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

int run_traverse(const TraverseArgs& a) {
    const auto r = epg::replay(epg::load_trace_file(a.trace));
    const auto e = epg::build_epg(r, epg::Granularity::PerInvocation);
    const epg::Subject s{r, e};
    const epg::VertexSet from(a.from.begin(), a.from.end());
    for (auto v : from)
        if (!e.graph.has_vertex(v)) throw CLI::ValidationError("--from", "no vertex " + std::to_string(v));

    epg::VertexSet result;
    auto need = [&](std::size_t n) {
        if (from.size() != n)
            throw CLI::ValidationError("--from", a.expr + " takes " + std::to_string(n) + " vertex id(s)");
    };
    if (a.expr == "frames") {
        result = epg::frame_vertices(s);
    } else if (a.expr == "transfer_blocks") {
        result = epg::transfer_blocks(s);
    } else if (a.expr == "reentrant") {
        need(1);
        result = epg::reentrant(s, *from.begin());
    } else if (a.expr == "control_block") {
        need(1);
        result = epg::control_block(s, *from.begin());
    } else if (a.expr == "succ_block") {
        need(2);
        result = epg::succ_block(s, a.from.at(0), a.from.at(1));
    } else if (a.expr == "control_source") {
        result = epg::control_source(s, from);
    } else if (a.expr == "write_control") {
        result = epg::write_control(s, from);
    } else {
        result = ExprParser{a.expr}.parse()(e.graph, from);
    }
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (auto v : result) {
        const auto& vert = e.graph.vertex(v);
        nlohmann::ordered_json item;
        item["id"] = v;
        item["kind"] = std::string{epg::to_string(vert.kind)};
        for (const auto& [k, val] : vert.props) item[k] = epg::property_to_string(val);
        out.push_back(std::move(item));
    }
    std::cout << out.dump(2) << "\n";
    return kClean;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Execution property graph analysis of EVM transaction traces"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "run the detectors over a trace (or a directory of traces)");
    analyze->add_option("trace", an.trace, "trace JSON file or directory")->required();
    analyze->add_option("--config", an.config, "TOML configuration file");
    analyze->add_option("--detectors", an.detectors, "comma separated subset of reentrancy,fac,price");
    analyze->add_option("--refinements", an.refinements, "comma separated subset of r1,a1,a2,a3,p1,p2");
    analyze->add_option("--prices", an.prices, "USD price table (CSV: token,block,usd_price)");
    analyze->add_option("--allowlist", an.allowlist, "token allowlist, one address per line");
    analyze->add_option("--out", an.out, "report path (default stdout)");

    ExportArgs ex;
    auto* exp = app.add_subcommand("export", "serialize one of the graphs built from a trace");
    exp->add_option("trace", ex.trace, "trace JSON file")->required();
    exp->add_option("--graph", ex.graph, "ctg, dcfg, ddg or epg")->capture_default_str();
    exp->add_option("--format", ex.format, "dot or graphson")->capture_default_str();
    exp->add_option("--granularity", ex.granularity, "contract vertices per address or per invocation")
        ->capture_default_str();
    exp->add_option("--frame", ex.frame, "frame whose DCFG to export")->capture_default_str();
    exp->add_option("--out", ex.out, "output path (default stdout)");

    TraverseArgs tr;
    auto* trav = app.add_subcommand("traverse", "evaluate a traversal over the execution property graph");
    trav->add_option("trace", tr.trace, "trace JSON file")->required();
    trav->add_option("--expr", tr.expr,
                     "named traversal (frames, transfer_blocks, reentrant, control_block, succ_block, "
                     "control_source, write_control) or an expression such as repeat(out(C,CT))")
        ->required();
    trav->add_option("--from", tr.from, "start vertex ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kClean : kError;
    }

    try {
        if (*analyze) return run_analyze(an);
        if (*exp) return run_export(ex);
        if (*trav) return run_traverse(tr);
    } catch (const epg::Error& e) {
        spdlog::error("{}", e.what());
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
