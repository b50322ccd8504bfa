use proptest::prelude::*;
use typespace_core::catalog::{select_category, DisplayState, OCCLUSION_EPS};
use typespace_core::coords::{Corner, DesignCoords};
use typespace_core::demo;
use typespace_core::Space;
use typespace_core::hex::project;
use typespace_core::EngineError;

fn space() -> &'static Space {
    static SPACE: std::sync::OnceLock<Space> = std::sync::OnceLock::new();
    SPACE.get_or_init(demo::demo_space)
}

fn c(x: f64, y: f64, z: f64) -> DesignCoords<f64> {
    DesignCoords::new([x, y, z]).unwrap()
}

#[derive(Debug, Clone)]
enum Op {
    Zoom(usize),
    Hover(usize),
    Click(usize),
    FineTune(usize, f64),
    Toggle,
    ShowAll,
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        3 => (0..64usize).prop_map(Op::Zoom),
        2 => (0..64usize).prop_map(Op::Hover),
        2 => (0..64usize).prop_map(Op::Click),
        1 => (0..3usize, 0.0..=1.0f64).prop_map(|(a, v)| Op::FineTune(a, v)),
        1 => Just(Op::Toggle),
        1 => Just(Op::ShowAll),
    ]
}

fn apply(s: &DisplayState, op: &Op) -> DisplayState {
    let pick = |i: usize| s.shown[i % s.shown.len()].coords;
    match op {
        Op::Zoom(i) => s.zoom_in(&pick(*i)).unwrap_or_else(|_| s.clone()),
        Op::Hover(i) => {
            let previews = s.hover_preview(&pick(*i)).unwrap();
            assert!(previews.iter().all(|p| p.as_array().iter().all(|v| (0.0..=1.0).contains(v))));
            s.clone()
        }
        Op::Click(i) => s.click(&pick(*i)).unwrap(),
        Op::FineTune(a, v) => match s.fine_tune_target {
            Some(base) => s.fine_tune(&base, *a, *v).unwrap().0,
            None => s.clone(),
        },
        Op::Toggle => s.toggle_start(),
        Op::ShowAll => s.show_all(),
    }
}

fn check_positions(s: &DisplayState) -> Result<(), TestCaseError> {
    for inst in s.shown.iter().chain(&s.occluded) {
        let want = project(&inst.coords) * s.scale + s.pan_offset;
        prop_assert!(inst.pos.distance(want) <= 1e-9, "{:?}", inst);
    }
    for (i, a) in s.shown.iter().enumerate() {
        for b in &s.shown[i + 1..] {
            prop_assert!(a.pos.distance(b.pos) >= OCCLUSION_EPS * s.scale);
        }
    }
    prop_assert_eq!(s.shown.iter().filter(|i| i.is_center).count(), 1);
    Ok(())
}

#[test]
fn first_zoom_adds_six_midpoints() {
    let space = space();
    let s0 = select_category(&space, Corner::new(0).unwrap()).unwrap();
    let s1 = s0.zoom_in(&c(0.0, 0.0, 0.0)).unwrap();
    let mut added: Vec<_> = s1.shown.iter().filter(|i| !s0.is_shown(&i.coords)).map(|i| i.coords).collect();
    let mut want = vec![
        c(0.5, 0.0, 0.0),
        c(0.0, 0.5, 0.0),
        c(0.0, 0.0, 0.5),
        c(0.5, 0.5, 0.0),
        c(0.5, 0.0, 0.5),
        c(0.0, 0.5, 0.5),
    ];
    let key = |v: &DesignCoords<f64>| v.as_array().map(|x| (x * 8.0) as i32);
    added.sort_by_key(key);
    want.sort_by_key(key);
    assert_eq!(added, want);
    assert_eq!(s1.zoom_level, 1);
    assert!(s1.shown.iter().filter(|i| !s0.is_shown(&i.coords)).all(|i| i.revealed_at_level == 1));
}

#[test]
fn zoom_caps_at_three() {
    let space = space();
    let mut s = select_category(&space, Corner::new(7).unwrap()).unwrap();
    for _ in 0..3 {
        s = s.zoom_in(&s.center()).unwrap();
    }
    assert_eq!(s.zoom_level, 3);
    assert_eq!(s.zoom_in(&s.center()), Err(EngineError::MaxZoom));
}

#[test]
fn revealed_midpoints_sit_between_parents() {
    let space = space();
    let s0 = select_category(&space, Corner::new(0).unwrap()).unwrap();
    let focus = c(1.0, 0.0, 0.0);
    let s1 = s0.zoom_in(&focus).unwrap();
    for inst in s1.shown.iter().filter(|i| i.revealed_at_level == 1) {
        let other = c(
            2.0 * inst.coords.get(0) - 1.0,
            2.0 * inst.coords.get(1),
            2.0 * inst.coords.get(2),
        );
        let want = (s1.position_of(&focus) + s1.position_of(&other)) * 0.5;
        assert!(inst.pos.distance(want) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn positions_stay_consistent(start in prop::bool::ANY, ops in prop::collection::vec(op(), 0..24)) {
        let space = space();
        let corner = Corner::new(if start { 7 } else { 0 }).unwrap();
        let mut s = select_category(&space, corner).unwrap();
        check_positions(&s)?;
        for o in &ops {
            s = apply(&s, o);
            check_positions(&s)?;
            prop_assert!(s.shown.len() <= 30 || s.show_all_active());
        }
    }

    #[test]
    fn toggle_start_is_an_involution(start in prop::bool::ANY, ops in prop::collection::vec(op(), 0..12)) {
        let space = space();
        let corner = Corner::new(if start { 7 } else { 0 }).unwrap();
        let mut s = select_category(&space, corner).unwrap();
        for o in &ops {
            s = apply(&s, o);
        }
        prop_assert!(s.toggle_start().toggle_start().approx_eq(&s, 1e-9));
    }
}
