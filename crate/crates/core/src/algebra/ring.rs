use std::sync::Arc;

use crate::error::{Error, Result};

/// Variables of a polynomial ring, partitioned into groups (one group per
/// projective factor).
///
/// A group may carry a homogenizing variable (the coordinate that equals one
/// on the affine patch) and/or a cone variable (the extra coordinate `u` of a
/// cone construction). Both are members of their own group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ring {
    names: Vec<String>,
    groups: Vec<Vec<usize>>,
    homogenizers: Vec<Option<usize>>,
    cone_vars: Vec<Option<usize>>,
    group_of: Vec<usize>,
}

impl Ring {
    pub fn new(
        names: Vec<String>,
        groups: Vec<Vec<usize>>,
        homogenizers: Vec<Option<usize>>,
    ) -> Result<Arc<Ring>> {
        let k = groups.len();
        Self::with_cones(names, groups, homogenizers, vec![None; k])
    }

    pub fn with_cones(
        names: Vec<String>,
        groups: Vec<Vec<usize>>,
        homogenizers: Vec<Option<usize>>,
        cone_vars: Vec<Option<usize>>,
    ) -> Result<Arc<Ring>> {
        let n = names.len();
        if groups.is_empty() {
            return Err(Error::InvalidArgument("a ring needs at least one group".into()));
        }
        if homogenizers.len() != groups.len() || cone_vars.len() != groups.len() {
            return Err(Error::InvalidArgument(
                "one homogenizer and cone slot per group required".into(),
            ));
        }
        let mut group_of = vec![usize::MAX; n];
        for (g, members) in groups.iter().enumerate() {
            for &v in members {
                if v >= n {
                    return Err(Error::InvalidArgument(format!("variable index {v} out of range")));
                }
                if group_of[v] != usize::MAX {
                    return Err(Error::InvalidArgument(format!(
                        "variable {} appears in two groups",
                        names[v]
                    )));
                }
                group_of[v] = g;
            }
        }
        if let Some(v) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(Error::InvalidArgument(format!(
                "variable {} belongs to no group",
                names[v]
            )));
        }
        for (g, special) in homogenizers.iter().zip(&cone_vars).enumerate() {
            for v in [special.0, special.1].into_iter().flatten() {
                if group_of.get(*v) != Some(&g) {
                    return Err(Error::InvalidArgument(format!(
                        "designated variable {v} is not a member of group {g}"
                    )));
                }
            }
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if name == "i" || !is_identifier(name) {
                return Err(Error::InvalidArgument(format!("invalid variable name {name:?}")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidArgument(format!("duplicate variable name {name:?}")));
            }
        }
        Ok(Arc::new(Ring {
            names,
            groups,
            homogenizers,
            cone_vars,
            group_of,
        }))
    }

    /// One group containing every variable, nothing designated.
    pub fn single<S: AsRef<str>>(names: &[S]) -> Result<Arc<Ring>> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let all = (0..names.len()).collect();
        Ring::new(names, vec![all], vec![None])
    }

    /// Variables named `prefix0 .. prefix{n-1}` in a single group.
    pub fn indexed(prefix: &str, n: usize) -> Arc<Ring> {
        let names: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
        Ring::single(&names).expect("generated names are valid")
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, var: usize) -> &str {
        &self.names[var]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn ngroups(&self) -> usize {
        self.groups.len()
    }

    pub fn group_of(&self, var: usize) -> usize {
        self.group_of[var]
    }

    pub fn homogenizer(&self, group: usize) -> Option<usize> {
        self.homogenizers[group]
    }

    pub fn homogenizers(&self) -> &[Option<usize>] {
        &self.homogenizers
    }

    pub fn cone_var(&self, group: usize) -> Option<usize> {
        self.cone_vars[group]
    }

    pub fn cone_vars(&self) -> &[Option<usize>] {
        &self.cone_vars
    }

    /// Projective dimension of each factor (group size minus one).
    pub fn factor_dims(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.len().saturating_sub(1)).collect()
    }

    /// Appends one homogenizing variable per group that lacks one.
    ///
    /// Existing variables keep their indices, so a polynomial of `self` is
    /// valid in the result after [`super::MPoly::recast`] with the identity map.
    pub fn homogenized(&self) -> Arc<Ring> {
        let mut names = self.names.clone();
        let mut groups = self.groups.clone();
        let mut homogenizers = self.homogenizers.clone();
        for g in 0..groups.len() {
            if homogenizers[g].is_some() {
                continue;
            }
            let base = if self.groups.len() == 1 {
                "h".to_string()
            } else {
                format!("h{g}")
            };
            let name = fresh_name(&names, &base);
            names.push(name);
            let idx = names.len() - 1;
            groups[g].push(idx);
            homogenizers[g] = Some(idx);
        }
        Ring::with_cones(names, groups, homogenizers, self.cone_vars.clone())
            .expect("homogenized ring is valid")
    }

    /// The ring of the (multi-)cone: one new variable per group, placed in
    /// front of all existing variables. Old variable `j` maps to `j + k`.
    pub fn cone(&self) -> Arc<Ring> {
        let k = self.groups.len();
        let mut names = Vec::with_capacity(self.names.len() + k);
        for g in 0..k {
            let base = if k == 1 { "u".to_string() } else { format!("u{g}") };
            names.push(fresh_name(&self.names, &base));
        }
        names.extend(self.names.iter().cloned());
        let groups = self
            .groups
            .iter()
            .enumerate()
            .map(|(g, members)| {
                let mut m = vec![g];
                m.extend(members.iter().map(|&v| v + k));
                m
            })
            .collect();
        let homogenizers = self.homogenizers.iter().map(|h| h.map(|v| v + k)).collect();
        let cones = (0..k).map(Some).collect();
        Ring::with_cones(names, groups, homogenizers, cones).expect("cone ring is valid")
    }

    /// Same variables with every designation (homogenizer, cone) dropped.
    pub fn plain(&self) -> Arc<Ring> {
        let k = self.groups.len();
        Ring::with_cones(self.names.clone(), self.groups.clone(), vec![None; k], vec![None; k])
            .expect("plain ring is valid")
    }
}

fn fresh_name(existing: &[String], base: &str) -> String {
    if !existing.iter().any(|n| n == base) {
        return base.to_string();
    }
    (0..)
        .map(|i| format!("{base}_{i}"))
        .find(|cand| !existing.iter().any(|n| n == cand))
        .expect("infinite candidate stream")
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_must_partition() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(Ring::new(names.clone(), vec![vec![0]], vec![None]).is_err());
        assert!(Ring::new(names.clone(), vec![vec![0, 1], vec![1]], vec![None, None]).is_err());
        assert!(Ring::new(names, vec![vec![0], vec![1]], vec![None, None]).is_ok());
    }

    #[test]
    fn homogenizer_must_sit_in_its_group() {
        let names = vec!["a".to_string(), "b".to_string()];
        assert!(Ring::new(names.clone(), vec![vec![0], vec![1]], vec![Some(1), None]).is_err());
        assert!(Ring::new(names, vec![vec![0], vec![1]], vec![Some(0), None]).is_ok());
    }

    #[test]
    fn cone_prepends_one_variable_per_group() {
        let r = Ring::new(
            vec!["x0".into(), "x1".into(), "y0".into()],
            vec![vec![0, 1], vec![2]],
            vec![None, None],
        )
        .unwrap();
        let c = r.cone();
        assert_eq!(c.nvars(), 5);
        assert_eq!(c.groups(), &[vec![0, 2, 3], vec![1, 4]]);
        assert_eq!(c.cone_var(1), Some(1));
        assert_eq!(c.name(0), "u0");
    }

    #[test]
    fn homogenized_names_avoid_collisions() {
        let r = Ring::single(&["h", "x"]).unwrap();
        let h = r.homogenized();
        assert_eq!(h.name(2), "h_0");
        assert_eq!(h.homogenizer(0), Some(2));
    }

    #[test]
    fn imaginary_unit_is_reserved() {
        assert!(Ring::single(&["i", "x"]).is_err());
    }
}
