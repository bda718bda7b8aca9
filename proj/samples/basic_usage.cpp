// Reads a trace (default: household.csv next to this file), prints the cost of each algorithm.

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "planswitch/chase.hpp"
#include "planswitch/cost_model.hpp"
#include "planswitch/oracles.hpp"

using namespace planswitch;

int main(int argc, char** argv) {
    const char* path = argc > 1 ? argv[1] : PLANSWITCH_SAMPLE_TRACE;
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "cannot open %s\n", path);
        return 1;
    }
    std::stringstream text;
    text << in.rdbuf();
    const Trace trace = parse_trace(text.str());

    // H = 10% of the fixed rate, $100 cancellation fee
    const double beta = 100.0;
    const CostSeries cs = cost_series_relative(trace, 0.1);
    const DeltaTrace dt = delta_trace(cs, beta);

    const Schedule offline = ofa_s(dt);
    const Schedule online = gchase_s(dt);
    const FractionalSchedule frac = cchase(dt);

    std::mt19937_64 rng(7);
    const Schedule sampled = gchase_r(dt, rng);

    std::printf("slots            %zu\n", cs.size());
    std::printf("offline          %.2f\n", sp_cost(offline, cs, beta));
    std::printf("online           %.2f\n", sp_cost(online, cs, beta));
    std::printf("fractional       %.2f\n", csp_cost(frac, cs, beta));
    std::printf("one random run   %.2f\n", sp_cost(sampled, cs, beta));

    // decreasing fee: alpha per remaining month of a 12-month contract
    const double alpha = 10.0;
    const int len = 12;
    const auto best = dp_dsp(cs, alpha, len);
    const auto capped = gchase_s_capped(drift_delta_trace(cs, alpha, len), len);
    std::printf("dsp offline      %.2f\n", best.best_cost);
    std::printf("dsp online       %.2f (forced switches: %zu)\n", dsp_cost(capped.schedule, cs, alpha, len),
                capped.forced_switches);

    std::printf("online schedule  ");
    for (State s : online.states) std::printf("%d", static_cast<int>(s));
    std::printf("\n");
}
