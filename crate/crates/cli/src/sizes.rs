//! Hidden-size lists: comma-separated items, each a single size or an
//! inclusive `start:end:step` range. The result must be strictly ascending.

pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, String> {
    let mut sizes = Vec::new();
    for item in spec.split(',') {
        let item = item.trim();
        let parts: Vec<&str> = item.split(':').collect();
        let num = |s: &str| -> Result<usize, String> {
            s.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad number {s:?} in size spec {spec:?}"))
        };
        match parts.as_slice() {
            [one] => sizes.push(num(one)?),
            [start, end, step] => {
                let (start, end, step) = (num(start)?, num(end)?, num(step)?);
                if step == 0 {
                    return Err(format!("zero step in size spec {spec:?}"));
                }
                if start > end {
                    return Err(format!("descending range {item:?} in size spec {spec:?}"));
                }
                sizes.extend((start..=end).step_by(step));
            }
            _ => return Err(format!("malformed item {item:?} in size spec {spec:?}")),
        }
    }
    if sizes.contains(&0) {
        return Err(format!("hidden size 0 in size spec {spec:?}"));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("size spec {spec:?} is not strictly ascending"));
    }
    Ok(sizes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_range() {
        assert_eq!(
            parse_sizes("25:70:5").unwrap(),
            vec![25, 30, 35, 40, 45, 50, 55, 60, 65, 70]
        );
    }

    #[test]
    fn single_and_lists() {
        assert_eq!(parse_sizes("65").unwrap(), vec![65]);
        assert_eq!(parse_sizes("10, 20:30:10,45").unwrap(), vec![10, 20, 30, 45]);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["70:25:5", "", "a", "10:20", "10:20:0", "30,20", "0", "5,5"] {
            assert!(parse_sizes(bad).is_err(), "{bad:?}");
        }
    }
}
