#!/usr/bin/env python3
"""Sampling and hardware reduction of every mode relative to filled Nyquist operation."""

from submimo import ArrayMode, build_environment, sampling_reduction


def main():
    print(f"{'mode':>8} {'adc_rate_x':>10} {'bw_guard_x':>10} {'bw_x':>6} "
          f"{'elements_x':>10} {'sampling_%':>10} {'channels_%':>10}")
    for mode in ArrayMode:
        env = build_environment(mode, "desk")
        s = sampling_reduction(mode, env.plan, env.adc)
        print(f"{mode.value:>8} {s.spectral_rate_factor:10.2f} "
              f"{s.bandwidth_factor_with_guards:10.2f} "
              f"{s.bandwidth_factor_no_guards:6.2f} {s.spatial_factor:10.3f} "
              f"{s.combined_sampling_reduction_pct:10.2f} "
              f"{s.hardware_channel_reduction_pct:10.2f}")


if __name__ == "__main__":
    main()
