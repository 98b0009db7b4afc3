// A poor economy catching up: simulate the wage dynamics from a low initial
// wage, print the transition, and compare the limit with the steady-state
// scan.
#include <cstdio>

#include "olg/dynamics.hpp"

int main() {
    const olg::EconomyParams params{0.5, 2.0, olg::CobbDouglas(1.0, 0.33)};
    const auto traj = olg::simulate(0.1, 60, params);

    std::printf("%4s %10s %10s %10s %10s %10s\n", "t", "w", "y", "phi", "s_b", "s");
    for (std::size_t t = 0; t < traj.states.size(); t += 5) {
        const auto& st = traj.states[t];
        std::printf("%4zu %10.6f %10.6f %10.6f %10.6f %10.6f\n", t, st.wage, st.output,
                    st.rent, st.entrepreneur_saving, st.national_saving);
    }

    const auto report = olg::steady_states(params);
    std::printf("\ninterior steady states (unique=%s):\n",
                report.unique ? "true" : "false");
    for (const auto& root : report.interior)
        std::printf("  w* = %.12g  (map slope %.4f, %s)\n", root.wage, root.map_slope,
                    root.stable ? "stable" : "unstable");
    std::printf("%s\n", report.corner_note.c_str());
    return 0;
}
