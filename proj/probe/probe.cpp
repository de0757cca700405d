#include <chrono>
#include <cstdio>
#include "sid/hankel.hpp"
#include "sid/n4sid.hpp"
#include "sid/plant.hpp"
#include "sid/projection.hpp"
#include "sid/tsvd.hpp"

using Clock = std::chrono::steady_clock;
static double secs(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main() {
    using namespace sid;
    for (auto [N, j] : {std::pair<Index, Index>{10, 300}, {10, 1000}, {20, 10000}, {50, 10000}}) {
        const Index L = 2 * N + j - 1;
        auto u = gen_excitation(L, 1, 42);
        auto rec = simulate(ball_beam(), u);
        auto t0 = Clock::now();
        auto h = build_hankel_set(rec, N, j);
        double th = secs(t0);
        t0 = Clock::now();
        auto [oi, oim1] = oblique_stage(h);
        double tob = secs(t0);
        t0 = Clock::now();
        auto tf = svd_full(oi);
        double tsvd_full = secs(t0);
        t0 = Clock::now();
        auto tt = svd_dense(oi);
        double tsvd_thin = secs(t0);
        t0 = Clock::now();
        auto tm = parallel_svd_by_cols(oi, (j + 9) / 10, 1);
        double tsvd_mat = secs(t0);
        double share = tsvd_full / (tob + tsvd_full) * 100.0;
        std::printf("N=%2ld j=%5ld  hankel %.4fs oblique %.4fs  svd_full %.4fs (share %.1f%%)  svd_thin %.4fs  svd_mat10 %.4fs  rank(full)=%ld s1=%.3e s3/s1=%.3e\n",
                    (long)N, (long)j, th, tob, tsvd_full, share, tsvd_thin, tsvd_mat,
                    (long)tf.rank(), tf.S[0], tf.S.size() > 2 ? tf.S[2] / tf.S[0] : -1.0);
    }
    return 0;
}
