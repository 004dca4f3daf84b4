use proptest::prelude::*;
use uavsim_core::detection::{DetectionCalibration, Face};
use uavsim_core::engine::{
    energy_report, run, run_batch, run_seeded, DetectionSetup, OverflowPolicy, Placement, PowerModel, QueuePolicy,
    Scenario, SimulationResult,
};
use uavsim_core::kinematics::{ApConfig, GimbalState, Trajectory, Waypoint};
use uavsim_core::mcs::{load_mcs_table, McsTable, RadioHardware};
use uavsim_core::video::{CodecMode, CodecModel, VideoProfile};
use uavsim_core::Error;

const MCS_CSV: &str = include_str!("../../../scenarios/mcs_80211ad_sc.csv");

fn table() -> McsTable {
    load_mcs_table(MCS_CSV).unwrap()
}

fn hover(duration_s: f64) -> Scenario {
    Scenario::hover_100m(table(), duration_s)
}

fn check_invariants(s: &Scenario, r: &SimulationResult) {
    assert_eq!(r.frames_generated, r.frames_delivered + r.frames_dropped + r.frames_in_flight);
    assert_eq!(r.steps.len(), s.step_count());

    let mut capacity_integral = 0.0;
    let mut prev = (0, 0, 0);
    for st in &r.steps {
        capacity_integral += st.capacity_bps * st.dt_s;
        assert!(st.queue_bits >= 0.0);
        assert!(st.bits_sent <= st.capacity_bps * st.dt_s * (1.0 + 1e-9) + 1e-6);
        let delivered_bits = st.frames_delivered_cum as f64 * r.frame_bits;
        assert!(delivered_bits <= capacity_integral * (1.0 + 1e-9) + r.frame_bits);
        let cur = (st.frames_generated_cum, st.frames_delivered_cum, st.frames_dropped_cum);
        assert!(cur.0 >= prev.0 && cur.1 >= prev.1 && cur.2 >= prev.2);
        prev = cur;
        if !st.in_scan || st.extra_loss_db.is_none() || !st.in_track {
            assert_eq!(st.capacity_bps, 0.0);
            assert_eq!(st.bits_sent, 0.0);
        }
    }
    assert!(r.delivered_bits <= capacity_integral * (1.0 + 1e-9) + 1e-6);
    if let Some(last) = r.steps.last() {
        assert_eq!(last.frames_delivered_cum, r.frames_delivered);
        assert_eq!(last.frames_dropped_cum, r.frames_dropped);
        assert_eq!(last.frames_generated_cum, r.frames_generated);
    }

    let max_capacity = r.steps.iter().map(|st| st.capacity_bps).fold(0.0, f64::max);
    for &lat in &r.frame_latencies_s {
        let floor = r.frame_bits / max_capacity + s.codec.encode_latency_s + s.codec.decode_latency_s;
        assert!(lat >= floor * (1.0 - 1e-9), "latency {lat} below {floor}");
    }
}

#[test]
fn hover_delivers_every_frame() {
    let s = hover(60.0);
    let r = run(&s).unwrap();
    check_invariants(&s, &r);
    assert_eq!(r.frames_generated, 450);
    assert_eq!(r.frames_dropped, 0);
    assert_eq!(r.frames_delivered, 450);
    assert!((r.goodput_bps / 1.49e9 - 1.0).abs() < 0.01, "{}", r.goodput_bps);
    for st in &r.steps {
        assert_eq!(st.mcs_index, Some(12));
        assert!((st.snr_db.unwrap() - 23.4).abs() < 0.1);
    }
    // Each frame takes 199065600 / 1.5e9 s on the air.
    let tx = 199_065_600.0 / 1.5e9;
    assert!((r.latency.max_s - tx).abs() < 1e-9);
    assert!((r.latency.mean_s - tx).abs() < 1e-9);
}

#[test]
fn hover_is_step_size_robust() {
    let coarse = run(&hover(60.0)).unwrap();
    let mut fine = hover(60.0);
    fine.channel_sample_dt_s /= 2.0;
    let fine = run(&fine).unwrap();
    assert!(coarse.frames_delivered.abs_diff(fine.frames_delivered) <= 1);
    assert!((coarse.goodput_bps / fine.goodput_bps - 1.0).abs() < 0.005);
}

#[test]
fn overload_saturates_link() {
    let mut s = hover(60.0);
    s.video.fps = 60.0;
    let r = run(&s).unwrap();
    check_invariants(&s, &r);
    let fraction = r.delivered_fraction();
    assert!((fraction - 0.125).abs() < 0.01, "{fraction}");
    assert!(r.frames_dropped > 0);

    // Queue sampled at arrivals grows until the first drop.
    let first_drop = r.steps.iter().position(|st| st.frames_dropped_cum > 0).unwrap();
    let mut last = -1.0;
    let mut prev_gen = 0;
    for st in &r.steps[..first_drop] {
        if st.frames_generated_cum > prev_gen {
            assert!(st.queue_bits > last);
            last = st.queue_bits;
        }
        prev_gen = st.frames_generated_cum;
    }
    assert!(last > 0.0);
}

#[test]
fn zero_duration_is_empty() {
    let r = run(&hover(0.0)).unwrap();
    assert!(r.steps.is_empty());
    assert_eq!((r.frames_generated, r.frames_delivered, r.frames_dropped), (0, 0, 0));
    assert_eq!(r.goodput_bps, 0.0);
    assert_eq!(r.energy_ground_j, 0.0);
}

#[test]
fn invalid_scenarios_rejected_before_stepping() {
    let mut s = hover(10.0);
    s.video.fps = -1.0;
    assert!(matches!(run(&s), Err(Error::Invalid("VideoProfile.fps", _))));
    let mut s = hover(10.0);
    s.duration_s = 20.0;
    assert!(matches!(run(&s), Err(Error::Invalid("Trajectory.waypoints", _))));
    let mut s = hover(10.0);
    s.queue.max_queue_bits = 0.0;
    assert!(run(&s).is_err());
    let mut s = hover(10.0);
    s.channel_sample_dt_s = 0.0;
    assert!(run(&s).is_err());
}

#[test]
fn energy_arithmetic() {
    let s = hover(60.0);
    let r = run(&s).unwrap();
    let e = energy_report(&r, &s).unwrap();
    assert!((e.ground_active_time_s - 60.0).abs() < 1e-9);
    assert!((e.ground_j - 1038.0).abs() < 1e-6, "{}", e.ground_j);
    assert_eq!(r.energy_ground_j, e.ground_j);

    let mut idle = hover(60.0);
    idle.video.fps = 0.0;
    let r_idle = run(&idle).unwrap();
    assert!((r_idle.energy_ground_j - 228.0).abs() < 1e-6);

    let mut edge = hover(60.0);
    edge.power = PowerModel { drone_base_w: 200.0, drone_radio_w: 5.0, drone_ai_w: 13.5, ..edge.power };
    let mut onboard = edge.clone();
    onboard.placement = Placement::Onboard;
    let (re, ro) = (run(&edge).unwrap(), run(&onboard).unwrap());
    assert!(ro.energy_drone_j > re.energy_drone_j);
    assert!((re.energy_drone_j - 205.0 * 60.0).abs() < 1e-6);
    assert!((ro.energy_drone_j - 218.5 * 60.0).abs() < 1e-6);
    assert!((ro.energy_ground_j - 228.0).abs() < 1e-6);

    // A result checked against the wrong scenario.
    assert!(matches!(energy_report(&r, &hover(30.0)), Err(Error::Mismatch(_))));
}

#[test]
fn codec_latency_and_power_are_accounted() {
    let mut s = hover(10.0);
    s.codec = CodecModel {
        mode: CodecMode::Compressed,
        compression_ratio: 100.0,
        encode_latency_s: 0.02,
        decode_latency_s: 0.01,
        encode_power_w: 4.0,
        decode_power_w: 2.0,
    };
    let r = run(&s).unwrap();
    check_invariants(&s, &r);
    let tx = 1_990_656.0 / 1.5e9;
    assert!((r.latency.mean_s - (tx + 0.03)).abs() < 1e-9);
    let e = energy_report(&r, &s).unwrap();
    assert!((e.drone_encode_j - 4.0 * 0.02 * r.frames_generated as f64).abs() < 1e-9);
    assert!((e.ground_decode_j - 2.0 * 0.01 * r.frames_delivered as f64).abs() < 1e-9);
}

fn flyby(height: f64, speed: f64) -> Scenario {
    let mut s = hover(20.0);
    s.trajectory = Trajectory::new(vec![
        Waypoint { t_s: 0.0, position_m: [-10.0 * speed, 0.0, height], roll_deg: 0.0 },
        Waypoint { t_s: 20.0, position_m: [10.0 * speed, 0.0, height], roll_deg: 0.0 },
    ])
    .unwrap();
    s
}

#[test]
fn flyby_link_exists_only_inside_scan() {
    let s = flyby(30.0, 10.0);
    let r = run(&s).unwrap();
    check_invariants(&s, &r);
    let in_scan: Vec<_> = r.steps.iter().filter(|st| st.in_scan).collect();
    assert!(!in_scan.is_empty() && in_scan.len() < r.steps.len());
    // |x| <= 30 tan(13.5 deg) = 7.2 m, i.e. about 1.44 s of the pass.
    let window = in_scan.len() as f64 * s.channel_sample_dt_s;
    assert!((window - 2.0 * 30.0 * 13.5f64.to_radians().tan() / 10.0).abs() < 0.03, "{window}");
    let peak = r.steps.iter().map(|st| st.angular_rate_deg_s).fold(0.0, f64::max);
    assert!((peak / (10.0f64 / 30.0).to_degrees() - 1.0).abs() < 0.01);

    let mut limited = s.clone();
    limited.max_tracking_rate_deg_s = 15.0;
    let rl = run(&limited).unwrap();
    check_invariants(&limited, &rl);
    assert!(rl.steps.iter().any(|st| st.in_scan && !st.in_track));
    assert!(rl.delivered_bits < r.delivered_bits);
}

#[test]
fn orthogonal_polarization_blocks_without_gimbal() {
    let mut s = hover(2.0);
    s.trajectory = Trajectory::new(vec![
        Waypoint { t_s: 0.0, position_m: [0.0, 0.0, 100.0], roll_deg: 90.0 },
        Waypoint { t_s: 2.0, position_m: [0.0, 0.0, 100.0], roll_deg: 90.0 },
    ])
    .unwrap();
    s.gimbal_enabled = false;
    let r = run(&s).unwrap();
    check_invariants(&s, &r);
    assert_eq!(r.frames_delivered, 0);
    assert!(r.steps.iter().all(|st| st.extra_loss_db.is_none() && st.bits_sent == 0.0));

    // The gimbal slews onto the new plane at 90 deg/s and restores the link.
    s.gimbal_enabled = true;
    let r = run(&s).unwrap();
    check_invariants(&s, &r);
    assert!(r.steps[0].pol_mismatch_deg > 0.0);
    assert_eq!(r.steps.last().unwrap().pol_mismatch_deg, 0.0);
    assert!(r.frames_delivered > 0);
}

#[test]
fn detection_counts_only_delivered_frames() {
    let mut s = hover(10.0);
    s.detection = Some(DetectionSetup {
        calibration: DetectionCalibration::default(),
        faces: vec![Face { physical_width_m: 0.16, distance_m: 12.8 }; 136],
        horizontal_fov_deg: 90.0,
    });
    let r = run(&s).unwrap();
    let per_frame = r.expected_detections_per_delivered_frame.unwrap();
    assert!((per_frame - 86.2).abs() < 0.1);
    assert!((r.expected_detections_total.unwrap() - per_frame * r.frames_delivered as f64).abs() < 1e-6);
    assert!(r.realized_detections.is_none());

    let a = run_seeded(&s, Some(3)).unwrap();
    let b = run_seeded(&s, Some(3)).unwrap();
    assert_eq!(a, b);
    let realized = a.realized_detections.unwrap() as f64;
    let expected = a.expected_detections_total.unwrap();
    assert!((realized - expected).abs() < 0.05 * expected);

    let mut overload = s.clone();
    overload.video.fps = 60.0;
    let ro = run(&overload).unwrap();
    assert!((ro.expected_detections_total.unwrap() - per_frame * ro.frames_delivered as f64).abs() < 1e-6);
}

#[test]
fn batch_runs_keep_input_order() {
    let scenarios: Vec<Scenario> = [2.0, 4.0, 1.0, 3.0].iter().map(|&d| hover(d)).collect();
    let out = run_batch(&scenarios, None, 3).unwrap();
    for (s, r) in scenarios.iter().zip(out) {
        let r = r.unwrap();
        assert_eq!(r.duration_s, s.duration_s);
        assert_eq!(r, run(s).unwrap());
    }
}

fn scenario_strategy() -> impl Strategy<Value = Scenario> {
    let waypoints = prop::collection::vec((-150.0..150.0f64, -150.0..150.0f64, 5.0..200.0f64, -180.0..180.0f64), 1..5);
    (
        waypoints,
        0.5..5.0f64,
        0.004..0.05f64,
        prop::sample::select(vec![(1920u32, 1080u32), (3840, 2160), (640, 480)]),
        0.0..60.0f64,
        any::<bool>(),
        (1.0..200.0f64, 0.0..0.05f64, 0.0..0.05f64),
        (5e7..4e9f64, 0.0..1.5f64, any::<bool>()),
        (any::<bool>(), 1.0..180.0f64, any::<bool>()),
        (any::<bool>(), 0.0..3.0f64, any::<bool>()),
    )
        .prop_map(|(wps, duration, dt, (w, h), fps, compressed, codec, queue, gimbal, misc)| {
            let n = wps.len();
            let waypoints = wps
                .into_iter()
                .enumerate()
                .map(|(i, (x, y, z, roll))| Waypoint {
                    t_s: match i {
                        0 => 0.0,
                        _ if i + 1 == n => duration,
                        _ => duration * i as f64 / (n - 1) as f64,
                    },
                    position_m: [x, y, z],
                    roll_deg: roll,
                })
                .collect::<Vec<_>>();
            let waypoints = if n == 1 {
                let mut wp = waypoints[0];
                let first = wp;
                wp.t_s = duration;
                vec![first, wp]
            } else {
                waypoints
            };
            let mut s = Scenario::hover_100m(table(), duration);
            s.trajectory = Trajectory::new(waypoints).unwrap();
            s.channel_sample_dt_s = dt;
            s.video = VideoProfile { width: w, height: h, fps, bits_per_pixel: 24 };
            if compressed {
                s.codec = CodecModel {
                    mode: CodecMode::Compressed,
                    compression_ratio: codec.0,
                    encode_latency_s: codec.1,
                    decode_latency_s: codec.2,
                    encode_power_w: 1.0,
                    decode_power_w: 1.0,
                };
            }
            s.queue = QueuePolicy {
                max_queue_bits: queue.0,
                frame_deadline_s: queue.1,
                overflow: if queue.2 { OverflowPolicy::DropNewest } else { OverflowPolicy::DropOldest },
            };
            if gimbal.0 {
                s.ground_radio = RadioHardware::array();
                s.drone_radio = RadioHardware::array();
            }
            s.gimbal = GimbalState::new(0.0, gimbal.1).unwrap();
            s.gimbal_enabled = gimbal.2;
            if misc.0 {
                s.ap = ApConfig::new([0.6, 0.0, 0.8]).unwrap();
            }
            s.mcs_hysteresis_db = misc.1;
            if misc.2 {
                s.placement = Placement::Onboard;
            }
            s
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn randomized_runs_conserve_frames_and_respect_causality(s in scenario_strategy()) {
        let r = run(&s).unwrap();
        check_invariants(&s, &r);
        prop_assert_eq!(&r, &run(&s).unwrap());
    }
}
