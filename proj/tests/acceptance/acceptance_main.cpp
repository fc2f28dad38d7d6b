// One pass/fail line per acceptance criterion; exit status 1 if any fails.
#include "modscat/error.hpp"
#include "modscat/verify.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <string>
#include <thread>

using namespace modscat;

int main(int argc, char** argv) {
    VerifyOptions opt;
    opt.presets_dir = default_presets_dir();
    opt.threads = std::max(1u, std::thread::hardware_concurrency());
    if (argc > 1) opt.threads = static_cast<unsigned>(std::stoul(argv[1]));

    std::vector<CriterionResult> rows;
    try {
        if (opt.threads > 1) prepare_runs(opt);
        for (const auto& s : suite_names()) {
            auto r = run_suite(s, opt);
            rows.insert(rows.end(), r.begin(), r.end());
        }
    } catch (const std::exception& e) {
        std::cout << "acceptance: aborted: " << e.what() << "\n";
        return 3;
    }

    std::map<int, std::vector<const CriterionResult*>> by_id;
    for (const auto& r : rows) by_id[r.id].push_back(&r);
    bool all = true;
    for (int id = 1; id <= 11; ++id) {
        auto it = by_id.find(id);
        bool pass = it != by_id.end();
        std::string detail;
        if (pass)
            for (const auto* r : it->second) {
                pass = pass && r->pass;
                if (!detail.empty()) detail += "; ";
                detail += r->name + " = " + r->measured + " (" + r->threshold + ")";
            }
        all = all && pass;
        std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << "\n";
    }
    std::cout << (all ? "all criteria pass" : "some criteria FAIL") << "\n";
    return all ? 0 : 1;
}
