//! Small reference instances used by the tests, examples and the CLI docs.

use crate::gda::{MultiInstance, MultiStudent, School};
use crate::model::{Instance, Quota, StudentRecord};

fn build(
    capacity: usize,
    max_rank: usize,
    types: &[&str],
    quotas: Vec<Quota>,
    students: Vec<StudentRecord>,
    priority: Vec<String>,
) -> Instance {
    Instance::new(
        capacity,
        max_rank,
        types.iter().map(|t| t.to_string()).collect(),
        quotas,
        students,
        priority,
    )
    .expect("fixture instances are well formed")
}

/// Four students, one minimum quota for `t1`, capacity 2.
///
/// `s1`, `s2` hold `t1`; `s3`, `s4` hold nothing; priority `s4 ≻ s3 ≻ s2 ≻ s1`.
pub fn single_reserve() -> Instance {
    let students = vec![
        StudentRecord::new("s1", &["t1"]),
        StudentRecord::new("s2", &["t1"]),
        StudentRecord::new("s3", &[]),
        StudentRecord::new("s4", &[]),
    ];
    let priority = ["s4", "s3", "s2", "s1"].map(String::from).to_vec();
    build(2, 2, &["t1"], vec![Quota::new("t1", 1, 1)], students, priority)
}

/// The four-group imbalance instance scaled so each group has `per_group`
/// students; capacity `2 · per_group`, rank-1 quotas of `per_group / 2` for
/// `t1` and `t2`, general seats at rank 2.
///
/// Priority puts group `none` first, then `t1`, then `t2`, then `t1+t2`.
pub fn four_groups_scaled(per_group: usize) -> Instance {
    let groups: [(&str, &[&str]); 4] = [
        ("u00", &[]),
        ("u10", &["t1"]),
        ("u01", &["t2"]),
        ("u11", &["t1", "t2"]),
    ];
    let mut students = Vec::new();
    let mut priority = Vec::new();
    for (prefix, types) in groups {
        for i in 1..=per_group {
            let id = format!("{prefix}_{i}");
            students.push(StudentRecord::new(id.clone(), types));
            priority.push(id);
        }
    }
    let half = per_group / 2;
    build(
        2 * per_group,
        2,
        &["t1", "t2"],
        vec![Quota::new("t1", 1, half), Quota::new("t2", 1, half)],
        students,
        priority,
    )
}

/// 200 students in four groups of 50, capacity 100, minimum quotas of 25 for `t1` and `t2`.
pub fn four_groups() -> Instance {
    four_groups_scaled(50)
}

/// Capacity 4 with a single rank: `t1` students `s11…s15` ranked above `t2`
/// students `s21…s23`, both types capped at 4. With `with_s16` a sixth `t1`
/// student `s16` is appended after `s15`.
pub fn capped_types(with_s16: bool) -> Instance {
    let mut t1: Vec<String> = (1..=5).map(|i| format!("s1{i}")).collect();
    if with_s16 {
        t1.push("s16".into());
    }
    let t2: Vec<String> = (1..=3).map(|i| format!("s2{i}")).collect();
    let mut students = Vec::new();
    for id in &t1 {
        students.push(StudentRecord::new(id.clone(), &["t1"]));
    }
    for id in &t2 {
        students.push(StudentRecord::new(id.clone(), &["t2"]));
    }
    let priority = t1.iter().chain(&t2).cloned().collect();
    build(
        4,
        1,
        &["t1", "t2"],
        vec![Quota::new("t1", 1, 4), Quota::new("t2", 1, 4)],
        students,
        priority,
    )
}

/// Two schools, four students, one type.
///
/// School `x` (capacity 1, one rank-1 `t1` seat, priority `b a c d`) and
/// school `y` (capacity 1, no quotas, priority `a b c d`). Students `a`, `c`
/// hold `t1`. Preferences: `a: x y`, `b: x`, `c: x y`, `d: y`.
///
/// Round 1: `x` keeps `a` (its rank-1 seat must go to a `t1` student) and
/// releases `b`, `c`; `y` keeps `d`. Round 2: `c` proposes to `y`, which
/// prefers `c` and releases `d`. Nobody is left to propose.
pub fn two_schools() -> MultiInstance {
    let student = |id: &str, types: &[&str], prefs: &[&str]| MultiStudent {
        record: StudentRecord::new(id, types),
        preferences: prefs.iter().map(|p| p.to_string()).collect(),
    };
    let students = vec![
        student("a", &["t1"], &["x", "y"]),
        student("b", &[], &["x"]),
        student("c", &["t1"], &["x", "y"]),
        student("d", &[], &["y"]),
    ];
    let order = |ids: [&str; 4]| ids.map(String::from).to_vec();
    let schools = vec![
        School {
            id: "x".into(),
            capacity: 1,
            max_rank: 2,
            quotas: vec![Quota::new("t1", 1, 1)],
            priority: order(["b", "a", "c", "d"]),
        },
        School {
            id: "y".into(),
            capacity: 1,
            max_rank: 1,
            quotas: vec![],
            priority: order(["a", "b", "c", "d"]),
        },
    ];
    MultiInstance::new(vec!["t1".into()], students, schools).expect("fixture is well formed")
}

/// Wraps a single-school instance as a one-school market where every
/// student applies to `school`.
pub fn single_school(instance: &Instance, school: &str) -> MultiInstance {
    let students = (0..instance.num_students())
        .map(|s| MultiStudent {
            record: instance.student_record(s),
            preferences: vec![school.to_string()],
        })
        .collect();
    let priority = instance.priority().iter().map(|&s| instance.student_id(s).to_string()).collect();
    let schools = vec![School {
        id: school.to_string(),
        capacity: instance.capacity(),
        max_rank: instance.max_rank(),
        quotas: instance.quota_entries(),
        priority,
    }];
    MultiInstance::new(instance.type_names().to_vec(), students, schools).expect("instance is well formed")
}
